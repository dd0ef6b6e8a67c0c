//! Truncations of `ℓ²(ℕⁿ)` and the level-`k` representations of the sphere
//! algebra on them.
//!
//! Every generator sends a basis vector `|m⟩` to a multiple of a single basis
//! vector, so represented words are weighted partial permutations. The
//! untruncated action lives in [`rep::act_letter`]; operators on a
//! [`TruncatedSpace`] compress it to the box `m_i ≤ cutoff`.

mod operator;
pub mod rep;
mod scalar;

pub use operator::SparseOperator;
pub use rep::{
    act_letter, act_word, in_support, rep_element, rep_p, rep_pm, rep_raw, rep_word, rep_z, Parity,
};
pub use scalar::{Scalar, Surd};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A basis label `(m_1, …, m_n)` of `ℓ²(ℕⁿ)`; `m_0 = 0` is implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `m_i` for `0 ≤ i ≤ n`, with `m_0 = 0`.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            0
        } else {
            self.0[i - 1]
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `m + ε_i^k`: adds one to `m_{i+1}, …, m_k`.
    pub fn raised(&self, i: usize, k: usize) -> Self {
        let mut out = self.clone();
        for x in &mut out.0[i..k] {
            *x += 1;
        }
        out
    }

    /// `m - ε_i^k`, or `None` if an entry would go negative.
    pub fn lowered(&self, i: usize, k: usize) -> Option<Self> {
        let mut out = self.clone();
        for x in &mut out.0[i..k] {
            *x = x.checked_sub(1)?;
        }
        Some(out)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// The constraint sets selecting basis vectors of `V^n_k` and of
/// `V^n_{k-1} ∩ V^n_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintSet {
    /// `m_1 ≤ … ≤ m_k` and `m_{k+1} > … > m_n`; for `k = 0` the whole index
    /// is strictly descending.
    Level(usize),
    /// `m_1 ≤ … ≤ m_k` and `m_k > m_{k+1} > … > m_n`, for `k ≥ 1`. Empty at
    /// `k = 0`.
    Overlap(usize),
}

fn weakly_ascending(xs: &[u32]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

fn strictly_descending(xs: &[u32]) -> bool {
    xs.windows(2).all(|w| w[0] > w[1])
}

pub fn in_constraint(m: &MultiIndex, c: ConstraintSet) -> bool {
    let n = m.n();
    match c {
        ConstraintSet::Level(k) if k > n => false,
        ConstraintSet::Level(k) => weakly_ascending(&m.0[..k]) && strictly_descending(&m.0[k..]),
        ConstraintSet::Overlap(k) if k == 0 || k > n => false,
        ConstraintSet::Overlap(k) => {
            weakly_ascending(&m.0[..k]) && strictly_descending(&m.0[k - 1..])
        }
    }
}

/// All multi-indices with entries `≤ cutoff`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSpace {
    n: usize,
    cutoff: u32,
    basis: Vec<MultiIndex>,
}

/// Basis sizes beyond this are refused rather than allocated.
const MAX_BASIS: u64 = 1 << 24;

impl TruncatedSpace {
    pub fn new(n: usize, cutoff: u32) -> Result<Self> {
        let side = cutoff as u64 + 1;
        let size = side
            .checked_pow(n as u32)
            .filter(|&s| s <= MAX_BASIS)
            .ok_or_else(|| {
                Error::Precondition(format!("box of side {side} in dimension {n} is too large"))
            })?;
        let mut basis = Vec::with_capacity(size as usize);
        let mut cur = vec![0u32; n];
        loop {
            basis.push(MultiIndex(cur.clone()));
            // odometer increment, last entry fastest
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(Self { n, cutoff, basis });
                }
                pos -= 1;
                if cur[pos] < cutoff {
                    cur[pos] += 1;
                    break;
                }
                cur[pos] = 0;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn index(&self, pos: usize) -> &MultiIndex {
        &self.basis[pos]
    }

    /// Position of `m` in the basis, or `None` outside the box.
    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        if m.n() != self.n {
            return None;
        }
        let side = self.cutoff as usize + 1;
        let mut pos = 0usize;
        for &x in &m.0 {
            if x > self.cutoff {
                return None;
            }
            pos = pos * side + x as usize;
        }
        Some(pos)
    }

    /// Whether every entry is at most `cutoff - margin`, so that `margin`
    /// unit shifts cannot leave the box.
    pub fn is_interior(&self, m: &MultiIndex, margin: u32) -> bool {
        self.cutoff >= margin && m.0.iter().all(|&x| x <= self.cutoff - margin)
    }

    pub fn members(&self, c: ConstraintSet) -> impl Iterator<Item = (usize, &MultiIndex)> {
        self.basis
            .iter()
            .enumerate()
            .filter(move |(_, m)| in_constraint(m, c))
    }
}
