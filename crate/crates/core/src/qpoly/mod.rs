//! Exact arithmetic in the Laurent polynomial ring `Q[q, q^-1]`.
//!
//! Every symbolic identity in this crate is checked over this ring, so the
//! coefficients are arbitrary-precision rationals and zero terms are never
//! stored. Terms are kept in a [`BTreeMap`] keyed by exponent, which makes
//! structural equality, ordering and hashing canonical.

mod combinatorics;
mod text;

pub use combinatorics::{qfact, qint, qmultinomial};
pub(crate) use text::Scanner;

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A finitely supported map `exponent -> rational coefficient`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigRational>,
}

// Coefficients are almost always integers; skipping the gcd reduction that
// `Ratio` performs on every operation dominates the cost of normalization.
fn radd(slot: &mut BigRational, c: &BigRational) {
    if slot.denom().is_one() && c.denom().is_one() {
        *slot = BigRational::from_integer(slot.numer() + c.numer());
    } else {
        *slot += c;
    }
}

fn rmul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    /// `c * q^exp`.
    pub fn monomial(c: BigRational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(BigRational::one(), exp)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.terms.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Returns `(c, e)` when the polynomial is the single term `c q^e`.
    pub fn as_monomial(&self) -> Option<(&BigRational, i64)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (c, *e))
        } else {
            None
        }
    }

    fn add_term(&mut self, exp: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigRational::zero);
        radd(slot, &c);
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, rmul(v, c))).collect(),
        }
    }

    /// Multiplication by `q^by`.
    pub fn shift(&self, by: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect(),
        }
    }

    /// The substitution `q -> q^-1`.
    pub fn invert_q(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division. Fails if the divisor does not divide `self` in `Q[q, q^-1]`.
    pub fn div_exact(&self, divisor: &LaurentPoly) -> Result<LaurentPoly> {
        let (Some(d_lo), Some(d_hi)) = (divisor.min_exp(), divisor.max_exp()) else {
            return Err(Error::DivisionByZero);
        };
        let Some(n_lo) = self.min_exp() else {
            return Ok(Self::zero());
        };
        // Work with ordinary polynomials: strip the lowest powers of q.
        let lead = divisor.coeff(d_hi);
        let d_deg = d_hi - d_lo;
        let mut rem: BTreeMap<i64, BigRational> = self
            .terms
            .iter()
            .map(|(e, c)| (e - n_lo, c.clone()))
            .collect();
        let mut quot = BTreeMap::new();
        while let Some((&top, top_c)) = rem.iter().next_back() {
            if top < d_deg {
                break;
            }
            let factor = top_c / &lead;
            let shift = top - d_deg;
            for (e, c) in divisor.terms() {
                let k = e - d_lo + shift;
                let slot = rem.entry(k).or_insert_with(BigRational::zero);
                *slot -= c * &factor;
                if slot.is_zero() {
                    rem.remove(&k);
                }
            }
            quot.insert(shift + n_lo - d_lo, factor);
        }
        if !rem.is_empty() {
            return Err(Error::InexactDivision {
                dividend: self.to_string(),
                divisor: divisor.to_string(),
            });
        }
        Ok(Self { terms: quot })
    }

    /// Exact evaluation at a nonzero rational point.
    pub fn eval_rational(&self, q0: &BigRational) -> Result<BigRational> {
        if q0.is_zero() {
            if self.min_exp().is_some_and(|e| e < 0) {
                return Err(Error::EvaluateAtZero);
            }
            return Ok(self.coeff(0));
        }
        let mut acc = BigRational::zero();
        for (e, c) in self.terms() {
            acc += c * rational_pow(q0, e);
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, q0: f64) -> Result<f64> {
        if q0 == 0.0 {
            if self.min_exp().is_some_and(|e| e < 0) {
                return Err(Error::EvaluateAtZero);
            }
            return Ok(self.coeff(0).to_f64().unwrap_or(f64::NAN));
        }
        Ok(self
            .terms()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * q0.powi(e as i32))
            .sum())
    }

    /// Sum of absolute values of the terms at `q0 > 0`; bounds `|p(q0)|`.
    pub fn abs_eval_f64(&self, q0: f64) -> f64 {
        self.terms()
            .map(|(e, c)| c.abs().to_f64().unwrap_or(f64::NAN) * q0.powi(e as i32))
            .sum()
    }
}

/// `base^exp` for a nonzero rational base and any integer exponent.
pub fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    let mag = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::integer(c)
    }
}

impl From<BigRational> for LaurentPoly {
    fn from(c: BigRational) -> Self {
        Self::constant(c)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(e, -c.clone());
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, rmul(c1, c2));
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly { (&self).$method(&rhs) }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly { (&self).$method(rhs) }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly { self.$method(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}
