//! Matrix-entry backends: plain floats, and exact surds `Σ r_f √f` over
//! squarefree integers `f`, which is closed under the products of
//! `√(1 - q^{2j})` factors that occur at rational `q`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::qpoly::{rational_pow, LaurentPoly};

/// Entry type of represented operators, with the matching type of the
/// deformation parameter.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    type Param: Clone + fmt::Debug + Send + Sync;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Rejects parameters outside `0 < q < 1`.
    fn check_param(q: &Self::Param) -> Result<()>;
    fn param_to_f64(q: &Self::Param) -> f64;
    /// `q^e`.
    fn q_pow(q: &Self::Param, e: i64) -> Self;
    /// `√(1 - q^{2e})` for `e ≥ 0`.
    fn sqrt_one_minus_q2(q: &Self::Param, e: i64) -> Result<Self>;
    fn eval(p: &LaurentPoly, q: &Self::Param) -> Result<Self>;
}

impl Scalar for f64 {
    type Param = f64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        *self
    }

    fn check_param(q: &f64) -> Result<()> {
        if *q > 0.0 && *q < 1.0 {
            Ok(())
        } else {
            Err(Error::DeformationOutOfRange(q.to_string()))
        }
    }
    fn param_to_f64(q: &f64) -> f64 {
        *q
    }
    fn q_pow(q: &f64, e: i64) -> Self {
        q.powi(e as i32)
    }
    fn sqrt_one_minus_q2(q: &f64, e: i64) -> Result<Self> {
        Ok((1.0 - q.powi(2 * e as i32)).sqrt())
    }
    fn eval(p: &LaurentPoly, q: &f64) -> Result<Self> {
        p.eval_f64(*q)
    }
}

/// A finite sum `Σ c_f √f` with rational `c_f` and distinct squarefree
/// positive integers `f` (the rational part sits at `f = 1`). Distinct
/// squarefree roots are linearly independent over the rationals, so
/// structural equality is value equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Surd {
    terms: BTreeMap<BigInt, BigRational>,
}

/// Largest radicand whose squarefree part is computed by trial division.
const MAX_RADICAND_BITS: u64 = 72;

thread_local! {
    static SQUAREFREE: RefCell<HashMap<BigInt, (BigInt, BigInt)>> = RefCell::new(HashMap::new());
}

/// Writes `r = s² f` with `f` squarefree. Primes up to the cube root are
/// divided out; what is left has at most two prime factors, so it is either
/// a perfect square or squarefree.
fn split_square(r: &BigInt) -> Result<(BigInt, BigInt)> {
    if r.bits() > MAX_RADICAND_BITS {
        return Err(Error::RadicandTooLarge(r.to_string()));
    }
    if let Some(hit) = SQUAREFREE.with(|c| c.borrow().get(r).cloned()) {
        return Ok(hit);
    }
    let mut rest = r.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let limit = rest.cbrt().to_u64().expect("bounded radicand") + 1;
    let mut p = 2u64;
    while p <= limit {
        let bp = BigInt::from(p);
        let mut count = 0u32;
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
            count += 1;
        }
        square *= num_traits::pow(bp.clone(), (count / 2) as usize);
        if count % 2 == 1 {
            free *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        square *= root;
    } else {
        free *= rest;
    }
    let out = (square, free);
    SQUAREFREE.with(|c| c.borrow_mut().insert(r.clone(), out.clone()));
    Ok(out)
}

impl Surd {
    pub fn rational(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(BigInt::one(), c);
        }
        Self { terms }
    }

    /// Exact square root of a nonnegative rational.
    pub fn sqrt(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Precondition(format!("square root of negative {r}")));
        }
        if r.is_zero() {
            return Ok(Self::default());
        }
        // √(a/b) = √(ab) / b
        let (a, b) = (r.numer(), r.denom());
        let (s, f) = split_square(&(a * b))?;
        let mut terms = BTreeMap::new();
        terms.insert(f, BigRational::new(s, b.clone()));
        Ok(Self { terms })
    }

    /// The rational value, if there is no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, f: BigInt, c: BigRational) {
        let slot = self.terms.entry(f).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let mag = c.abs();
            if r.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt({r})")?;
            } else {
                write!(f, "{mag}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

impl Scalar for Surd {
    type Param = BigRational;

    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone());
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                // √a √b = g √((a/g)(b/g)) with g = gcd(a, b); the product of
                // the cofactors is again squarefree
                let g = a.gcd(b);
                let f = (a / &g) * (b / &g);
                out.add_term(f, x * y * BigRational::from_integer(g));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(f, c)| (f.clone(), -c)).collect(),
        }
    }
    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(f, c)| c.to_f64().unwrap_or(f64::NAN) * f.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    fn check_param(q: &BigRational) -> Result<()> {
        if q.is_positive() && *q < BigRational::one() {
            Ok(())
        } else {
            Err(Error::DeformationOutOfRange(q.to_string()))
        }
    }
    fn param_to_f64(q: &BigRational) -> f64 {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn q_pow(q: &BigRational, e: i64) -> Self {
        Self::rational(rational_pow(q, e))
    }
    fn sqrt_one_minus_q2(q: &BigRational, e: i64) -> Result<Self> {
        Self::sqrt(&(BigRational::one() - rational_pow(q, 2 * e)))
    }
    fn eval(p: &LaurentPoly, q: &BigRational) -> Result<Self> {
        Ok(Self::rational(p.eval_rational(q)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn squarefree_split() {
        for (r, s, f) in [(72, 6, 2), (1, 1, 1), (49, 7, 1), (15, 1, 15), (1023, 1, 1023), (4095, 3, 455)] {
            assert_eq!(split_square(&BigInt::from(r)).unwrap(), (BigInt::from(s), BigInt::from(f)));
        }
        assert!(split_square(&(BigInt::one() << 80)).is_err());
    }

    #[test]
    fn square_roots_multiply_back() {
        let q = rat(1, 2);
        let a = Surd::sqrt_one_minus_q2(&q, 2).unwrap();
        assert_eq!(a.to_string(), "1/4*sqrt(15)");
        assert_eq!(a.mul(&a).as_rational(), Some(rat(15, 16)));
        let b = Surd::sqrt_one_minus_q2(&q, 1).unwrap();
        assert_eq!(b.to_string(), "1/2*sqrt(3)");
        let ab = a.mul(&b);
        assert_eq!(ab.to_string(), "3/8*sqrt(5)");
        assert!((ab.to_f64() - (15f64 / 16.0 * 0.75).sqrt()).abs() < 1e-15);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn params_outside_unit_interval_are_rejected() {
        assert!(f64::check_param(&1.2).is_err());
        assert!(f64::check_param(&0.0).is_err());
        assert!(Surd::check_param(&rat(3, 2)).is_err());
        assert!(Surd::check_param(&rat(1, 2)).is_ok());
    }

    proptest! {
        #[test]
        fn surd_arithmetic_matches_floats(xs in prop::collection::vec((1i64..40, -5i64..6, 1i64..4), 1..4),
                                          ys in prop::collection::vec((1i64..40, -5i64..6, 1i64..4), 1..4)) {
            let build = |v: &Vec<(i64, i64, i64)>| {
                v.iter().fold(Surd::zero(), |acc, &(r, n, d)| {
                    acc.add(&Surd::sqrt(&rat(r, 1)).unwrap().mul(&Surd::rational(rat(n, d))))
                })
            };
            let (x, y) = (build(&xs), build(&ys));
            prop_assert!((x.mul(&y).to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-9);
            prop_assert!((x.add(&y).to_f64() - x.to_f64() - y.to_f64()).abs() < 1e-9);
            prop_assert_eq!(x.mul(&y), y.mul(&x));
        }
    }
}
