//! The representations `π^{(n)}_k` on basis vectors and on truncated boxes.

use rayon::prelude::*;

use super::{in_constraint, ConstraintSet, MultiIndex, Scalar, SparseOperator, TruncatedSpace};
use crate::error::{Error, Result};
use crate::ncalgebra::{Generator, NCElement, RawElement, Word};
use crate::qpoly::LaurentPoly;

/// Whether `|m⟩` lies in `V^n_k`, outside of which `π^{(n)}_k` vanishes.
pub fn in_support(m: &MultiIndex, k: usize) -> bool {
    in_constraint(m, ConstraintSet::Level(k))
}

/// Coefficient and target of `π_k(z_i)|m⟩` for `m ∈ V_k`, `i ≤ k`.
fn raise<S: Scalar>(k: usize, q: &S::Param, i: usize, m: &MultiIndex) -> Result<(S, MultiIndex)> {
    if k == 0 {
        return Ok((S::one(), m.clone()));
    }
    if i == k {
        return Ok((S::q_pow(q, m.get(k) as i64), m.clone()));
    }
    let e = m.get(i + 1) as i64 - m.get(i) as i64 + 1;
    let c = S::q_pow(q, m.get(i) as i64).mul(&S::sqrt_one_minus_q2(q, e)?);
    Ok((c, m.raised(i, k)))
}

/// Untruncated action of `π^{(n)}_k(g)` on `|m⟩`, where `n = m.n()`:
/// `None` when the image is zero.
pub fn act_letter<S: Scalar>(
    k: usize,
    q: &S::Param,
    g: Generator,
    m: &MultiIndex,
) -> Result<Option<(S, MultiIndex)>> {
    let n = m.n();
    if k > n || g.index > n {
        return Err(Error::IndexOutOfRange {
            index: k.max(g.index),
            n,
        });
    }
    if g.index > k {
        return Ok(None);
    }
    if !g.starred {
        if !in_support(m, k) {
            return Ok(None);
        }
        return raise(k, q, g.index, m).map(Some);
    }
    // adjoint: the unique preimage under the raising shift, if it is in V_k
    let src = if k == 0 || g.index == k {
        Some(m.clone())
    } else {
        m.lowered(g.index, k)
    };
    match src {
        Some(src) if in_support(&src, k) => {
            let (c, _) = raise(k, q, g.index, &src)?;
            Ok(Some((c, src)))
        }
        _ => Ok(None),
    }
}

/// Untruncated action of a word, letters applied right to left.
pub fn act_word<S: Scalar>(
    k: usize,
    q: &S::Param,
    w: &Word,
    m: &MultiIndex,
) -> Result<Option<(S, MultiIndex)>> {
    let mut coef = S::one();
    let mut cur = m.clone();
    for &g in w.letters().iter().rev() {
        match act_letter(k, q, g, &cur)? {
            Some((c, next)) => {
                coef = coef.mul(&c);
                cur = next;
            }
            None => return Ok(None),
        }
    }
    Ok(Some((coef, cur)))
}

fn check_level(n: usize, k: usize, space: &TruncatedSpace) -> Result<()> {
    if space.n() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: space.n(),
        });
    }
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    Ok(())
}

/// Compressed action on the box: a letter whose image leaves the box gives
/// zero, so a word is represented by the product of compressed letters.
fn compressed_word<S: Scalar>(
    k: usize,
    q: &S::Param,
    w: &Word,
    space: &TruncatedSpace,
) -> Result<SparseOperator<S>> {
    let cols: Vec<Option<(usize, S)>> = (0..space.dim())
        .into_par_iter()
        .map(|col| {
            let mut coef = S::one();
            let mut cur = space.index(col).clone();
            for &g in w.letters().iter().rev() {
                match act_letter::<S>(k, q, g, &cur)? {
                    Some((c, next)) if space.position(&next).is_some() => {
                        coef = coef.mul(&c);
                        cur = next;
                    }
                    _ => return Ok(None),
                }
            }
            Ok(space.position(&cur).map(|row| (row, coef)))
        })
        .collect::<Result<_>>()?;
    let mut out = SparseOperator::zero(space.dim());
    for (col, hit) in cols.into_iter().enumerate() {
        if let Some((row, v)) = hit {
            out.add_entry(row, col, v);
        }
    }
    Ok(out)
}

/// `π^{(n)}_k(z_i)` compressed to the box.
pub fn rep_z<S: Scalar>(
    n: usize,
    k: usize,
    i: usize,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    check_level(n, k, space)?;
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    compressed_word(k, q, &Word(vec![Generator::z(i)]), space)
}

/// Product of compressed generator operators. The empty word gives the
/// identity of the box; see [`rep_element`] for the algebra unit.
pub fn rep_word<S: Scalar>(
    w: &Word,
    n: usize,
    k: usize,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    check_level(n, k, space)?;
    if let Some(bad) = w.max_index().filter(|&i| i > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    compressed_word(k, q, w, space)
}

/// Projection onto the span of box vectors in `V^n_k`.
fn support_projector<S: Scalar>(k: usize, space: &TruncatedSpace) -> SparseOperator<S> {
    SparseOperator::diagonal(
        space
            .basis()
            .iter()
            .map(|m| if in_support(m, k) { S::one() } else { S::zero() })
            .collect(),
    )
}

fn rep_terms<'a, S: Scalar>(
    terms: impl Iterator<Item = (&'a Word, &'a LaurentPoly)>,
    n: usize,
    k: usize,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    check_level(n, k, space)?;
    let mut out = SparseOperator::zero(space.dim());
    for (w, c) in terms {
        let c = S::eval(c, q)?;
        let op = if w.is_empty() {
            support_projector(k, space)
        } else {
            rep_word(w, n, k, space, q)?
        };
        out = out.add(&op.scale(&c));
    }
    Ok(out)
}

/// `π^{(n)}_k(x)`. The unit maps to the projection onto `V^n_k`, since the
/// representation is zero on its orthogonal complement.
pub fn rep_element<S: Scalar>(
    x: &NCElement,
    k: usize,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    rep_terms(x.terms(), x.ambient(), k, space, q)
}

/// As [`rep_element`], for an unnormalized sum of words.
pub fn rep_raw<S: Scalar>(
    x: &RawElement,
    k: usize,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    rep_terms(x.terms.iter().map(|(c, w)| (w, c)), x.n, k, space, q)
}

/// `π^{(n)}_k(p_ij)` for `i ≤ j` from its closed form.
pub fn rep_p<S: Scalar>(
    n: usize,
    k: usize,
    i: usize,
    j: usize,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    check_level(n, k, space)?;
    if j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if i > j {
        return Err(Error::Precondition(format!(
            "rep_p needs i <= j, got ({i}, {j}); take the adjoint of ({j}, {i})"
        )));
    }
    let mut out = SparseOperator::zero(space.dim());
    if j > k {
        return Ok(out);
    }
    for (col, m) in space.members(ConstraintSet::Level(k)) {
        let mi = m.get(i) as i64;
        let mj = m.get(j) as i64;
        let hit = if i == k {
            Some((S::q_pow(q, 2 * mi), m.clone()))
        } else {
            let delta = i64::from(i == j);
            let mut c = S::q_pow(q, mi + mj)
                .mul(&S::sqrt_one_minus_q2(q, m.get(i + 1) as i64 - mi + delta)?);
            if j < k {
                c = c.mul(&S::sqrt_one_minus_q2(q, m.get(j + 1) as i64 - mj + 1)?);
            }
            if c.is_zero() {
                None
            } else {
                m.lowered(i, j).map(|t| (c, t))
            }
        };
        if let Some((c, t)) = hit {
            if let Some(row) = space.position(&t) {
                out.add_entry(row, col, c);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn levels(self, n: usize) -> impl Iterator<Item = usize> {
        let start = match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        (start..=n).step_by(2)
    }
}

/// `π_±(x)`: the sum of `π^{(n)}_k(x)` over levels `k` of the given parity.
pub fn rep_pm<S: Scalar>(
    x: &NCElement,
    parity: Parity,
    space: &TruncatedSpace,
    q: &S::Param,
) -> Result<SparseOperator<S>> {
    let mut out = SparseOperator::zero(space.dim());
    for k in parity.levels(x.ambient()) {
        out = out.add(&rep_element(x, k, space, q)?);
    }
    Ok(out)
}
