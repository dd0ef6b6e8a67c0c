//! Canonical text form: terms by descending exponent, e.g. `q^2 + 1 + q^-2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LaurentPoly;
use crate::error::{Error, Result};

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if e == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            if e == 1 {
                f.write_str("q")?;
            } else {
                write!(f, "q^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sc = Scanner::new(s);
        let p = sc.laurent()?;
        sc.skip_ws();
        if !sc.at_end() {
            return Err(sc.error("trailing input"));
        }
        Ok(p)
    }
}

/// Byte-level cursor shared by the polynomial and algebra-element parsers.
pub(crate) struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub(crate) fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    /// Next non-whitespace character, without consuming it.
    pub(crate) fn peek_token(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek()
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Like `eat` but without skipping whitespace first.
    pub(crate) fn eat_adjacent(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    pub(crate) fn unsigned(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        Ok(self.src[start..self.pos].parse().expect("ascii digits"))
    }

    pub(crate) fn small_unsigned(&mut self) -> Result<usize> {
        let v = self.unsigned()?;
        usize::try_from(v).map_err(|_| self.error("integer too large"))
    }

    /// `INT` or `INT/INT`.
    pub(crate) fn rational(&mut self) -> Result<BigRational> {
        let num = self.unsigned()?;
        if self.eat('/') {
            let den = self.unsigned()?;
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    /// Exponent following a consumed `q`: nothing, `^e`, `^-e` or `^(-e)`.
    fn q_exponent(&mut self) -> Result<i64> {
        if !self.eat('^') {
            return Ok(1);
        }
        let paren = self.eat('(');
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mag = self.small_unsigned()? as i64;
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -mag } else { mag })
    }

    pub(crate) fn unsigned_laurent_term(&mut self) -> Result<LaurentPoly> {
        match self.peek_token() {
            Some('q') => {
                self.pos += 1;
                Ok(LaurentPoly::q_pow(self.q_exponent()?))
            }
            Some(c) if c.is_ascii_digit() => {
                let c = self.rational()?;
                let starred = self.eat('*');
                if self.peek_token() == Some('q') {
                    self.pos += 1;
                    let e = self.q_exponent()?;
                    Ok(LaurentPoly::monomial(c, e))
                } else if starred {
                    Err(self.error("expected 'q' after '*'"))
                } else {
                    Ok(LaurentPoly::constant(c))
                }
            }
            _ => Err(self.error("expected a number or 'q'")),
        }
    }

    /// A signed sum of terms; stops before anything that cannot continue it.
    pub(crate) fn laurent(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero();
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                break;
            };
            let t = self.unsigned_laurent_term()?;
            if neg {
                acc -= &t;
            } else {
                acc += &t;
            }
            first = false;
        }
        Ok(acc)
    }
}
