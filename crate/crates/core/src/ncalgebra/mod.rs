//! The coordinate algebra of the quantum sphere `S^{2n+1}_q` and its
//! projective subalgebra generated by `p_ij = z_i* z_j`.
//!
//! Elements are finite sums of words in `z_0..z_n, z_0*..z_n*` with Laurent
//! polynomial coefficients, always stored in normal form. A word is normal
//! when it reads `A S` with `A` unstarred letters in ascending index order,
//! `S` starred letters in descending index order, and it does not contain the
//! pair `z_n z_n*` at the junction. See [`normal`] for the rewrite rules.

mod normal;
pub mod relations;
mod text;

pub use normal::{normalize_leftmost, rewrite_pair};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::LaurentPoly;

/// One of `z_i` or `z_i*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub index: usize,
    pub starred: bool,
}

impl Generator {
    pub const fn z(index: usize) -> Self {
        Self {
            index,
            starred: false,
        }
    }

    pub const fn zs(index: usize) -> Self {
        Self {
            index,
            starred: true,
        }
    }

    pub fn star(self) -> Self {
        Self {
            index: self.index,
            starred: !self.starred,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{}", self.index)?;
        if self.starred {
            f.write_str("*")?;
        }
        Ok(())
    }
}

/// A finite product of generators; the empty word is the unit.
///
/// Words compare by length first, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word of `star(w)`: reversed with every star toggled.
    pub fn star(&self) -> Self {
        Self(self.0.iter().rev().map(|g| g.star()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|g| g.index).max()
    }

    /// Whether the word is irreducible for the rewrite system of `S^{2n+1}_q`.
    pub fn is_normal(&self, n: usize) -> bool {
        let split = self.0.iter().position(|g| g.starred).unwrap_or(self.0.len());
        let (a, s) = self.0.split_at(split);
        a.windows(2).all(|w| w[0].index <= w[1].index)
            && s.iter().all(|g| g.starred)
            && s.windows(2).all(|w| w[0].index >= w[1].index)
            && !(a.last() == Some(&Generator::z(n)) && s.first() == Some(&Generator::zs(n)))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<Generator>> for Word {
    fn from(v: Vec<Generator>) -> Self {
        Self(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// An unnormalized linear combination of words, the input to [`normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawElement {
    pub n: usize,
    pub terms: Vec<(LaurentPoly, Word)>,
}

impl RawElement {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: Vec::new(),
        }
    }

    pub fn word(n: usize, letters: impl Into<Word>) -> Self {
        Self {
            n,
            terms: vec![(LaurentPoly::one(), letters.into())],
        }
    }

    pub fn scalar(n: usize, c: LaurentPoly) -> Self {
        Self {
            n,
            terms: vec![(c, Word::unit())],
        }
    }

    pub fn push(&mut self, c: LaurentPoly, w: impl Into<Word>) -> &mut Self {
        self.terms.push((c, w.into()));
        self
    }

    pub fn scaled(mut self, c: &LaurentPoly) -> Self {
        for (k, _) in &mut self.terms {
            *k = &*k * c;
        }
        self
    }

    /// Concatenation product, no rewriting.
    pub fn product(&self, other: &RawElement) -> RawElement {
        let mut out = RawElement::new(self.n.max(other.n));
        for (c1, w1) in &self.terms {
            for (c2, w2) in &other.terms {
                out.terms.push((c1 * c2, w1.concat(w2)));
            }
        }
        out
    }

    pub fn minus(mut self, other: &RawElement) -> RawElement {
        self.terms
            .extend(other.terms.iter().map(|(c, w)| (-c, w.clone())));
        self
    }

    pub fn plus(mut self, other: &RawElement) -> RawElement {
        self.terms.extend(other.terms.iter().cloned());
        self
    }
}

impl From<&NCElement> for RawElement {
    fn from(x: &NCElement) -> Self {
        Self {
            n: x.n,
            terms: x.terms.iter().map(|(w, c)| (c.clone(), w.clone())).collect(),
        }
    }
}

/// An element of `A(S^{2n+1}_q)` in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NCElement {
    n: usize,
    terms: BTreeMap<Word, LaurentPoly>,
}

/// Reduces a raw linear combination to normal form.
pub fn normalize(raw: &RawElement) -> Result<NCElement> {
    let mut out = NCElement::zero(raw.n);
    for (c, w) in &raw.terms {
        if c.is_zero() {
            continue;
        }
        let image = normal::normalize_word(raw.n, w)?;
        out.add_scaled(&image, c);
    }
    Ok(out)
}

impl NCElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, LaurentPoly::one())
    }

    pub fn scalar(n: usize, c: LaurentPoly) -> Self {
        let mut x = Self::zero(n);
        if !c.is_zero() {
            x.terms.insert(Word::unit(), c);
        }
        x
    }

    pub fn generator(n: usize, g: Generator) -> Result<Self> {
        if g.index > n {
            return Err(Error::IndexOutOfRange { index: g.index, n });
        }
        let mut x = Self::zero(n);
        x.terms.insert(Word(vec![g]), LaurentPoly::one());
        Ok(x)
    }

    pub fn z(n: usize, i: usize) -> Result<Self> {
        Self::generator(n, Generator::z(i))
    }

    pub fn zs(n: usize, i: usize) -> Result<Self> {
        Self::generator(n, Generator::zs(i))
    }

    /// `p_ij = z_i* z_j`, the matrix entries of the defining projection.
    pub fn p(n: usize, i: usize, j: usize) -> Result<Self> {
        for idx in [i, j] {
            if idx > n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        normalize(&RawElement::word(n, vec![Generator::zs(i), Generator::z(j)]))
    }

    /// Normal form of a single word.
    pub fn from_word(n: usize, w: impl Into<Word>) -> Result<Self> {
        normalize(&RawElement::word(n, w))
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Word::unit()).is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    fn add_scaled(&mut self, other: &NCElement, c: &LaurentPoly) {
        for (w, k) in &other.terms {
            let slot = self.terms.entry(w.clone()).or_default();
            *slot += &(k * c);
            if slot.is_zero() {
                self.terms.remove(w);
            }
        }
    }

    fn check_same(&self, other: &NCElement) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &NCElement) -> Result<NCElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &LaurentPoly::one());
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NCElement) -> Result<NCElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &LaurentPoly::integer(-1));
        Ok(out)
    }

    pub fn checked_mul(&self, other: &NCElement) -> Result<NCElement> {
        self.check_same(other)?;
        Ok(normal::mul_normal(self, other))
    }

    pub fn scale(&self, c: &LaurentPoly) -> NCElement {
        let mut out = NCElement::zero(self.n);
        out.add_scaled(self, c);
        out
    }

    /// The involution: reverses words, toggles stars, fixes real coefficients.
    pub fn star(&self) -> NCElement {
        // the star of a normal word is again normal
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.star(), c.clone()))
            .collect();
        NCElement { n: self.n, terms }
    }

    /// The unital morphism `A(S^{2n+1}_q) -> A(S^{2n-1}_q)` sending `z_n` to 0.
    pub fn drop_top(&self) -> Result<NCElement> {
        if self.n == 0 {
            return Err(Error::Precondition(
                "z_n -> 0 needs ambient n >= 1".to_string(),
            ));
        }
        let target = self.n - 1;
        let mut raw = RawElement::new(target);
        for (w, c) in &self.terms {
            if w.letters().iter().all(|g| g.index <= target) {
                raw.terms.push((c.clone(), w.clone()));
            }
        }
        normalize(&raw)
    }

    /// Repeated [`drop_top`](Self::drop_top) down to ambient `k`.
    pub fn drop_to(&self, k: usize) -> Result<NCElement> {
        if k > self.n {
            return Err(Error::Precondition(format!(
                "cannot pull back from n = {} to larger k = {k}",
                self.n
            )));
        }
        let mut x = self.clone();
        while x.n > k {
            x = x.drop_top()?;
        }
        Ok(x)
    }

    /// Substitutes `q -> q^-1` in every coefficient.
    pub fn invert_q(&self) -> NCElement {
        NCElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.invert_q()))
                .collect(),
        }
    }
}

/// `p_ij` for `0 <= i, j <= n`.
pub fn p(n: usize, i: usize, j: usize) -> Result<NCElement> {
    NCElement::p(n, i, j)
}

/// The morphism `z_n -> 0`, see [`NCElement::drop_top`].
pub fn morphism_drop_zn(x: &NCElement) -> Result<NCElement> {
    x.drop_top()
}

impl Add<&NCElement> for &NCElement {
    type Output = NCElement;
    fn add(self, rhs: &NCElement) -> NCElement {
        self.checked_add(rhs).expect("ambient mismatch in add")
    }
}

impl Sub<&NCElement> for &NCElement {
    type Output = NCElement;
    fn sub(self, rhs: &NCElement) -> NCElement {
        self.checked_sub(rhs).expect("ambient mismatch in sub")
    }
}

impl Mul<&NCElement> for &NCElement {
    type Output = NCElement;
    fn mul(self, rhs: &NCElement) -> NCElement {
        self.checked_mul(rhs).expect("ambient mismatch in mul")
    }
}

impl Neg for &NCElement {
    type Output = NCElement;
    fn neg(self) -> NCElement {
        self.scale(&LaurentPoly::integer(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::qint;

    fn q(e: i64) -> LaurentPoly {
        LaurentPoly::q_pow(e)
    }

    fn one_minus_q2() -> LaurentPoly {
        LaurentPoly::one() - q(2)
    }

    #[test]
    fn unit_law() {
        let n = 2;
        let x = &NCElement::z(n, 1).unwrap() * &NCElement::zs(n, 0).unwrap();
        assert_eq!(&NCElement::one(n) * &x, x);
        assert_eq!(&x * &NCElement::one(n), x);
    }

    #[test]
    fn unstarred_letters_q_commute() {
        for n in 1..4 {
            for i in 0..=n {
                for j in (i + 1)..=n {
                    let zi = NCElement::z(n, i).unwrap();
                    let zj = NCElement::z(n, j).unwrap();
                    let lhs = &zi * &zj;
                    let rhs = (&zj * &zi).scale(&q(-1));
                    assert_eq!(lhs, rhs, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn star_moves_past_other_indices() {
        for n in 1..4 {
            for i in 0..=n {
                for j in (0..=n).filter(|&j| j != i) {
                    let a = &NCElement::zs(n, i).unwrap() * &NCElement::z(n, j).unwrap();
                    let b = (&NCElement::z(n, j).unwrap() * &NCElement::zs(n, i).unwrap())
                        .scale(&q(1));
                    assert!((&a - &b).is_zero());
                }
            }
        }
    }

    #[test]
    fn sphere_relation_sums() {
        for n in 0..4 {
            // z_0 z_0* + ... + z_n z_n* = 1
            let mut raw = RawElement::new(n);
            for i in 0..=n {
                raw.push(LaurentPoly::one(), vec![Generator::z(i), Generator::zs(i)]);
            }
            assert!(normalize(&raw).unwrap().is_one(), "n={n}");

            // [z_n*, z_n] = 0
            let mut raw = RawElement::word(n, vec![Generator::zs(n), Generator::z(n)]);
            raw.push(LaurentPoly::integer(-1), vec![Generator::z(n), Generator::zs(n)]);
            assert!(normalize(&raw).unwrap().is_zero());

            // [z_i*, z_i] = (1 - q^2) sum_{j > i} z_j z_j*
            for i in 0..n {
                let mut raw = RawElement::word(n, vec![Generator::zs(i), Generator::z(i)]);
                raw.push(LaurentPoly::integer(-1), vec![Generator::z(i), Generator::zs(i)]);
                for j in (i + 1)..=n {
                    raw.push(-one_minus_q2(), vec![Generator::z(j), Generator::zs(j)]);
                }
                assert!(normalize(&raw).unwrap().is_zero(), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn star_examples() {
        let n = 2;
        assert_eq!(NCElement::one(n).star(), NCElement::one(n));
        assert_eq!(NCElement::z(n, 0).unwrap().star(), NCElement::zs(n, 0).unwrap());
        assert_eq!(p(n, 0, 1).unwrap().star(), p(n, 1, 0).unwrap());
    }

    #[test]
    fn p_entries() {
        assert!(p(0, 0, 0).unwrap().is_one());
        assert_eq!(p(1, 2, 0), Err(Error::IndexOutOfRange { index: 2, n: 1 }));
        for n in 1..4 {
            // q-trace
            let mut tr = NCElement::zero(n);
            for i in 0..=n {
                tr = &tr + &p(n, i, i).unwrap().scale(&q(2 * i as i64));
            }
            assert!(tr.is_one(), "n={n}: {tr}");
            // P^2 = P
            for i in 0..=n {
                for k in 0..=n {
                    let mut s = NCElement::zero(n);
                    for j in 0..=n {
                        s = &s + &(&p(n, i, j).unwrap() * &p(n, j, k).unwrap());
                    }
                    assert_eq!(s, p(n, i, k).unwrap(), "n={n} ({i},{k})");
                }
            }
        }
    }

    #[test]
    fn mismatched_ambient_is_an_error() {
        let a = NCElement::z(1, 0).unwrap();
        let b = NCElement::z(2, 0).unwrap();
        assert_eq!(
            a.checked_mul(&b),
            Err(Error::AmbientMismatch { left: 1, right: 2 })
        );
        assert!(NCElement::z(1, 3).is_err());
    }

    #[test]
    fn drop_top_morphism() {
        let n = 2;
        assert!(NCElement::z(n, n).unwrap().drop_top().unwrap().is_zero());
        assert!(NCElement::one(n).drop_top().unwrap().is_one());
        assert!(NCElement::one(0).drop_top().is_err());
        // relation (e) for n maps to relation (e) for n - 1
        let mut raw = RawElement::new(n);
        for i in 0..=n {
            raw.push(LaurentPoly::one(), vec![Generator::z(i), Generator::zs(i)]);
        }
        let lhs_unnormalized: NCElement = {
            // build the element without letting the top relation fire
            let mut x = NCElement::zero(n);
            for (c, w) in &raw.terms {
                x.terms.insert(w.clone(), c.clone());
            }
            x
        };
        assert!(lhs_unnormalized.drop_top().unwrap().is_one());
        // images of p_ij land in the lower projective algebra
        for i in 0..=n {
            for j in 0..=n {
                let img = p(n, i, j).unwrap().drop_top().unwrap();
                if i == n || j == n {
                    assert!(img.is_zero());
                } else {
                    assert_eq!(img, p(n - 1, i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn drop_top_is_multiplicative_on_samples() {
        let n = 2;
        let a = &p(n, 0, 2).unwrap() * &p(n, 1, 1).unwrap();
        let b = &p(n, 2, 1).unwrap() + &p(n, 0, 1).unwrap().scale(&qint(3).unwrap());
        let lhs = (&a * &b).drop_top().unwrap();
        let rhs = &a.drop_top().unwrap() * &b.drop_top().unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substituted_generators_satisfy_inverted_relation() {
        // z'_i = q^i z_i*
        for n in 1..4 {
            let zp = |i: usize| NCElement::zs(n, i).unwrap().scale(&q(i as i64));
            let one_minus_qm2 = LaurentPoly::one() - q(-2);
            for i in 0..n {
                let lhs = &(&zp(i).star() * &zp(i)) - &(&zp(i) * &zp(i).star());
                let mut rhs = NCElement::zero(n);
                for j in (i + 1)..=n {
                    rhs = &rhs + &(&zp(j) * &zp(j).star()).scale(&one_minus_qm2);
                }
                assert_eq!(lhs, rhs, "n={n} i={i}");
            }
        }
    }
}
