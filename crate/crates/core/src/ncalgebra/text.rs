//! Text form of algebra elements, e.g. `z0 z1* + (q^2 - 1) z2 z2*`.

use std::fmt;

use super::{normalize, Generator, NCElement, RawElement, Word};
use crate::error::Result;
use crate::qpoly::{LaurentPoly, Scanner};

impl fmt::Display for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let minus_one = LaurentPoly::integer(-1);
        for (i, (w, c)) in self.terms().enumerate() {
            let neg = *c == minus_one;
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if c.is_one() || neg {
                write!(f, "{w}")?;
            } else if w.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c}) {w}")?;
            }
        }
        Ok(())
    }
}

impl NCElement {
    /// Parses a sum of products of factors. A factor is a parenthesised
    /// Laurent polynomial, a number, a power of `q`, or a generator `zI` /
    /// `zI*`. The result is normalized in the algebra of ambient `n`.
    pub fn parse(n: usize, s: &str) -> Result<NCElement> {
        let mut sc = Scanner::new(s);
        let mut acc = RawElement::new(n);
        let mut first = true;
        loop {
            let neg = if sc.eat('-') {
                true
            } else if sc.eat('+') || first {
                false
            } else {
                break;
            };
            let mut t = product(&mut sc, n)?;
            if neg {
                t = t.scaled(&LaurentPoly::integer(-1));
            }
            acc = acc.plus(&t);
            first = false;
        }
        sc.skip_ws();
        if !sc.at_end() {
            return Err(sc.error("trailing input"));
        }
        normalize(&acc)
    }
}

fn product(sc: &mut Scanner<'_>, n: usize) -> Result<RawElement> {
    let mut coeff = LaurentPoly::one();
    let mut word = Vec::new();
    let mut any = false;
    loop {
        match sc.peek_token() {
            Some('(') => {
                sc.expect('(')?;
                let p = sc.laurent()?;
                sc.expect(')')?;
                coeff = &coeff * &p;
            }
            Some('z') => {
                sc.expect('z')?;
                let index = sc.small_unsigned()?;
                if index > n {
                    return Err(sc.error(&format!("generator z{index} out of range for n = {n}")));
                }
                let starred = sc.eat_adjacent('*');
                word.push(Generator { index, starred });
            }
            Some(c) if c == 'q' || c.is_ascii_digit() => {
                let t = sc.unsigned_laurent_term()?;
                coeff = &coeff * &t;
            }
            _ if any => break,
            _ => return Err(sc.error("expected a factor")),
        }
        any = true;
    }
    let mut out = RawElement::new(n);
    out.push(coeff, Word(word));
    Ok(out)
}
