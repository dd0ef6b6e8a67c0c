//! Algebra elements with formal square-root prefactors `√R_1 ⋯ √R_r · x`,
//! where the radicands are Laurent polynomials that are never expanded.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::ncalgebra::NCElement;
use crate::qpoly::LaurentPoly;

/// A sum of `√R_1 ⋯ √R_r · x` over distinct radicand lists.
///
/// Radicand lists are kept canonical: even powers of `q` are pulled out,
/// unit radicands dropped, and repeated radicands paired into the body.
/// A zero residual in this form is an exact zero; the converse need not
/// hold, since distinct lists are not proven independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootElement {
    n: usize,
    parts: BTreeMap<Vec<LaurentPoly>, NCElement>,
}

/// Splits `R = q^{2t} R'` with the lowest exponent of `R'` equal to 0 or 1.
fn reduce_radicand(r: &LaurentPoly) -> (i64, LaurentPoly) {
    let low = r.min_exp().unwrap_or(0);
    let t = low.div_euclid(2);
    (t, r.shift(-2 * t))
}

impl RootElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            parts: BTreeMap::new(),
        }
    }

    pub fn exact(body: NCElement) -> Self {
        Self::new(Vec::new(), body)
    }

    /// `√R_1 ⋯ √R_r · body`.
    pub fn new(radicands: Vec<LaurentPoly>, body: NCElement) -> Self {
        let n = body.ambient();
        if radicands.iter().any(LaurentPoly::is_zero) || body.is_zero() {
            return Self::zero(n);
        }
        let mut outside = 0i64;
        let mut roots: Vec<LaurentPoly> = radicands
            .iter()
            .map(|r| {
                let (t, r) = reduce_radicand(r);
                outside += t;
                r
            })
            .filter(|r| !r.is_one())
            .collect();
        roots.sort();
        let mut scalar = LaurentPoly::q_pow(outside);
        let mut kept = Vec::with_capacity(roots.len());
        let mut i = 0;
        while i < roots.len() {
            if i + 1 < roots.len() && roots[i] == roots[i + 1] {
                scalar = &scalar * &roots[i];
                i += 2;
            } else {
                kept.push(roots[i].clone());
                i += 1;
            }
        }
        let mut parts = BTreeMap::new();
        parts.insert(kept, body.scale(&scalar));
        Self { n, parts }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The body when no square roots remain.
    pub fn as_exact(&self) -> Option<NCElement> {
        match self.parts.len() {
            0 => Some(NCElement::zero(self.n)),
            1 => self.parts.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn parts(&self) -> impl Iterator<Item = (&[LaurentPoly], &NCElement)> {
        self.parts.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Total number of words over all parts.
    pub fn num_terms(&self) -> usize {
        self.parts.values().map(NCElement::num_terms).sum()
    }

    fn absorb(&mut self, roots: Vec<LaurentPoly>, body: NCElement) -> Result<()> {
        let slot = self
            .parts
            .entry(roots)
            .or_insert_with(|| NCElement::zero(body.ambient()));
        *slot = slot.checked_add(&body)?;
        self.parts.retain(|_, v| !v.is_zero());
        Ok(())
    }

    pub fn checked_add(&self, other: &RootElement) -> Result<RootElement> {
        let mut out = self.clone();
        for (k, v) in &other.parts {
            out.absorb(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &RootElement) -> Result<RootElement> {
        self.checked_add(&other.scale(&LaurentPoly::integer(-1)))
    }

    pub fn checked_mul(&self, other: &RootElement) -> Result<RootElement> {
        let mut out = RootElement::zero(self.n);
        for (ka, va) in &self.parts {
            for (kb, vb) in &other.parts {
                let roots = ka.iter().chain(kb).cloned().collect();
                let term = RootElement::new(roots, va.checked_mul(vb)?);
                out = out.checked_add(&term)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentPoly) -> RootElement {
        let mut out = RootElement::zero(self.n);
        for (k, v) in &self.parts {
            let v = v.scale(c);
            if !v.is_zero() {
                out.parts.insert(k.clone(), v);
            }
        }
        out
    }

    /// Radicands are real scalars, so only the body is starred.
    pub fn star(&self) -> RootElement {
        RootElement {
            n: self.n,
            parts: self.parts.iter().map(|(k, v)| (k.clone(), v.star())).collect(),
        }
    }
}

impl fmt::Display for RootElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (roots, body)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            for r in roots {
                write!(f, "sqrt({r}) ")?;
            }
            if roots.is_empty() && self.parts.len() == 1 {
                write!(f, "{body}")?;
            } else {
                write!(f, "[{body}]")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn repeated_radicands_pair_off() {
        let x = NCElement::z(1, 0).unwrap();
        let r = poly("q + q^-1");
        let a = RootElement::new(vec![r.clone()], x.clone());
        let aa = a.checked_mul(&a).unwrap();
        let expect = x.checked_mul(&x).unwrap().scale(&r);
        assert_eq!(aa.as_exact(), Some(expect));
    }

    #[test]
    fn even_q_powers_leave_the_root() {
        let one = NCElement::one(1);
        let a = RootElement::new(vec![poly("q^4 + q^6")], one.clone());
        let b = RootElement::new(vec![poly("1 + q^2")], one.scale(&LaurentPoly::q_pow(2)));
        assert_eq!(a, b);
        let c = RootElement::new(vec![LaurentPoly::q_pow(-2)], one.clone());
        assert_eq!(c.as_exact(), Some(one.scale(&LaurentPoly::q_pow(-1))));
    }

    #[test]
    fn cancellation_and_zero() {
        let x = NCElement::z(1, 1).unwrap();
        let a = RootElement::new(vec![poly("2 + q")], x.clone());
        assert!(a.checked_sub(&a).unwrap().is_zero());
        assert!(RootElement::new(vec![LaurentPoly::zero()], x).is_zero());
        assert_eq!(a.star().star(), a);
    }
}
