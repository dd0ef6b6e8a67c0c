//! Symmetric q-integers, q-factorials and q-multinomial coefficients.

use super::LaurentPoly;
use crate::error::{Error, Result};

/// The symmetric q-integer `[n] = (q^n - q^-n) / (q - q^-1)`.
pub fn qint(n: i64) -> Result<LaurentPoly> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    let num = LaurentPoly::q_pow(n) - LaurentPoly::q_pow(-n);
    let den = LaurentPoly::q_pow(1) - LaurentPoly::q_pow(-1);
    num.div_exact(&den)
}

/// `[n]! = [n][n-1]...[1]`, with `[0]! = 1`.
pub fn qfact(n: i64) -> Result<LaurentPoly> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    let mut acc = LaurentPoly::one();
    for k in 1..=n {
        acc = &acc * &qint(k)?;
    }
    Ok(acc)
}

/// `[j_0, ..., j_n]! = [j_0 + ... + j_n]! / ([j_0]! ... [j_n]!)`.
pub fn qmultinomial(parts: &[i64]) -> Result<LaurentPoly> {
    if let Some(&bad) = parts.iter().find(|&&j| j < 0) {
        return Err(Error::NegativeArgument(bad));
    }
    let total: i64 = parts.iter().sum();
    let mut den = LaurentPoly::one();
    for &j in parts {
        den = &den * &qfact(j)?;
    }
    qfact(total)?.div_exact(&den)
}
