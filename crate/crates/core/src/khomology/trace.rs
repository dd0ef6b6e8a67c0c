//! Truncated traces of `π_+ − π_−` on `ℓ²(ℕ^k)`.
//!
//! Basis vectors outside `V_0 ∪ … ∪ V_k` are killed by every level, and each
//! vector of the union lies in exactly two consecutive supports: `V_{j-1} ∩ V_j`
//! is the overlap set `O_j`, and supports two or more levels apart
//! are orthogonal. The alternating trace over the box is therefore a sum over
//! the overlap sets of `(−1)^{j−1}` times the difference of adjacent levels,
//! and the largest entry of such an index is `m_j`, so the box `m_i ≤ c` cuts
//! each overlap set at `m_j ≤ c`.

use num_integer::binomial;

use crate::error::{Error, Result};
use crate::ncalgebra::Word;
use crate::repspace::{act_word, in_support, MultiIndex};

/// A finite sum `Σ c_w w` with coefficients already evaluated at `q0`, acting
/// on `ℓ²(ℕ^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated {
    pub k: usize,
    pub terms: Vec<(f64, Word)>,
}

impl Evaluated {
    /// `C` in the per-index bound `|Δ(m)| ≤ C q^{m_j}`: the number of words
    /// times the largest coefficient.
    pub fn bound_constant(&self) -> f64 {
        let max = self.terms.iter().map(|(c, _)| c.abs()).fold(0.0, f64::max);
        self.terms.len() as f64 * max
    }

    /// `⟨m|π_level(x)|m⟩`, with the unit word acting as the support indicator.
    pub fn diagonal(&self, level: usize, q0: f64, m: &MultiIndex) -> Result<f64> {
        let mut acc = 0.0;
        for (c, w) in &self.terms {
            if w.is_empty() {
                if in_support(m, level) {
                    acc += c;
                }
                continue;
            }
            if let Some((v, image)) = act_word::<f64>(level, &q0, w, m)? {
                if &image == m {
                    acc += c * v;
                }
            }
        }
        Ok(acc)
    }
}

pub(crate) fn check_q(q0: f64) -> Result<()> {
    if q0 > 0.0 && q0 < 1.0 {
        Ok(())
    } else {
        Err(Error::DeformationOutOfRange(q0.to_string()))
    }
}

/// Calls `f` on every `m ∈ ℕ^k` in the overlap set `O_j` with `m_j = t`:
/// `m_1 ≤ … ≤ m_j = t > m_{j+1} > … > m_k`.
pub fn for_each_overlap(k: usize, j: usize, t: u32, mut f: impl FnMut(&MultiIndex)) {
    assert!(1 <= j && j <= k, "overlap level {j} outside 1..={k}");
    let mut m = MultiIndex(vec![0; k]);
    m.0[j - 1] = t;
    ascending(&mut m, j - 1, t, j, &mut f);

    // fills positions `pos-1, pos-2, …, 0` with values ≤ `bound`, then the tail
    fn ascending(m: &mut MultiIndex, pos: usize, bound: u32, j: usize, f: &mut impl FnMut(&MultiIndex)) {
        if pos == 0 {
            let top = m.0[j - 1];
            descending(m, j, top, f);
            return;
        }
        for v in 0..=bound {
            m.0[pos - 1] = v;
            ascending(m, pos - 1, v, j, f);
        }
    }

    fn descending(m: &mut MultiIndex, pos: usize, above: u32, f: &mut impl FnMut(&MultiIndex)) {
        if pos == m.0.len() {
            f(m);
            return;
        }
        for v in 0..above {
            m.0[pos] = v;
            descending(m, pos + 1, v, f);
        }
    }
}

/// `|{m ∈ O_j ⊂ ℕ^k : m_j = t}| = C(t+j−1, j−1)·C(t, k−j)`.
pub fn overlap_count(k: usize, j: usize, t: u64) -> u64 {
    binomial(t + j as u64 - 1, j as u64 - 1) * binomial(t, (k - j) as u64)
}

/// Contribution of the shell `m_j = t` of `O_j`.
fn shell(x: &Evaluated, j: usize, t: u32, q0: f64) -> Result<f64> {
    let mut acc = 0.0;
    let mut err = None;
    for_each_overlap(x.k, j, t, |m| {
        if err.is_some() {
            return;
        }
        match (x.diagonal(j - 1, q0, m), x.diagonal(j, q0, m)) {
            (Ok(a), Ok(b)) => acc += a - b,
            (Err(e), _) | (_, Err(e)) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(if j % 2 == 1 { acc } else { -acc }),
    }
}

/// Per-level partial traces: entry `j − 1` holds the overlap-set sum of
/// `(−1)^{j−1}(π_{j−1} − π_j)` over `m_j ≤ cutoff`. At `k = 0` the single
/// entry is the value at the classical point.
pub fn level_sums(x: &Evaluated, q0: f64, cutoff: u32) -> Result<Vec<f64>> {
    check_q(q0)?;
    if x.k == 0 {
        return Ok(vec![x.diagonal(0, q0, &MultiIndex::zeros(0))?]);
    }
    (1..=x.k)
        .map(|j| (0..=cutoff).try_fold(0.0, |acc, t| Ok(acc + shell(x, j, t, q0)?)))
        .collect()
}

/// `Σ_t Δ_t` over `t ≤ cutoff`, shell by shell.
pub fn shell_sums(x: &Evaluated, q0: f64, cutoff: u32) -> Result<Vec<f64>> {
    check_q(q0)?;
    (0..=cutoff)
        .map(|t| (1..=x.k).try_fold(0.0, |acc, j| Ok(acc + shell(x, j, t, q0)?)))
        .collect()
}

/// `Σ_{j=1..k} Σ_{t>cutoff} C(t+j−1, j−1) C(t, k−j) q0^t`, summed until the
/// terms decrease geometrically and closed with the geometric remainder.
pub fn tail_sum(k: usize, q0: f64, cutoff: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let term = |t: u64| -> f64 {
        (1..=k)
            .map(|j| overlap_count(k, j, t) as f64)
            .sum::<f64>()
            * q0.powf(t as f64)
    };
    let mut total = 0.0;
    let mut t = cutoff as u64 + 1;
    let mut prev = term(t);
    loop {
        total += prev;
        t += 1;
        let next = term(t);
        let ratio = next / prev;
        // the ratio of successive terms decreases in t, so once it is below 1
        // the rest is dominated by a geometric series
        if ratio < 1.0 && next / (1.0 - ratio) <= total * 1e-16 {
            total += next / (1.0 - ratio);
            return total;
        }
        prev = next;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEstimate {
    pub value: f64,
    pub tail: f64,
}

/// The truncated trace of `(π_+ − π_−)(x)` over the box of side `cutoff`, with
/// the tail bound `C Σ_{t > cutoff} |O_j shell t| q0^t`.
pub fn truncated_trace(x: &Evaluated, q0: f64, cutoff: u32) -> Result<TraceEstimate> {
    let value = level_sums(x, q0, cutoff)?.iter().sum();
    let tail = x.bound_constant() * tail_sum(x.k, q0, cutoff);
    Ok(TraceEstimate { value, tail })
}

/// Smallest cutoff whose tail bound is below `target`, by doubling then
/// bisection. The bound is monotone in the cutoff.
pub fn cutoff_for_tail(constant: f64, k: usize, q0: f64, target: f64) -> u32 {
    let ok = |c: u32| constant * tail_sum(k, q0, c) < target;
    if ok(0) {
        return 0;
    }
    let mut hi = 1u32;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repspace::{in_constraint, ConstraintSet, TruncatedSpace};

    #[test]
    fn overlap_enumeration_matches_constraint_filter() {
        for k in 1..=4 {
            let space = TruncatedSpace::new(k, 6).unwrap();
            for j in 1..=k {
                for t in 0..=6u32 {
                    let mut seen = Vec::new();
                    for_each_overlap(k, j, t, |m| seen.push(m.clone()));
                    seen.sort();
                    let expect: Vec<_> = space
                        .members(ConstraintSet::Overlap(j))
                        .map(|(_, m)| m.clone())
                        .filter(|m| m.get(j) == t)
                        .collect();
                    assert_eq!(seen, expect, "k={k} j={j} t={t}");
                    assert_eq!(seen.len() as u64, overlap_count(k, j, t as u64));
                    assert!(seen.iter().all(|m| in_constraint(m, ConstraintSet::Overlap(j))));
                }
            }
        }
    }

    #[test]
    fn tail_sum_against_direct_summation() {
        for (k, q0, c) in [(1, 0.5f64, 3), (2, 0.8, 10), (3, 0.3, 0), (3, 0.8, 40)] {
            let direct: f64 = (c as u64 + 1..4000)
                .map(|t| (1..=k).map(|j| overlap_count(k, j, t) as f64).sum::<f64>() * q0.powf(t as f64))
                .sum();
            let closed = tail_sum(k, q0, c);
            assert!((closed - direct).abs() <= 1e-12 * direct.max(1e-300), "{k} {q0} {c}");
            assert!(closed >= direct);
        }
        // k = 1: Σ_{t>c} q^t
        let q0: f64 = 0.5;
        assert!((tail_sum(1, q0, 4) - q0.powi(5) / (1.0 - q0)).abs() < 1e-15);
    }

    #[test]
    fn cutoff_search_is_minimal() {
        for (k, q0) in [(1, 0.3), (2, 0.5), (3, 0.8)] {
            let c = cutoff_for_tail(10.0, k, q0, 1e-6);
            assert!(10.0 * tail_sum(k, q0, c) < 1e-6);
            assert!(c == 0 || 10.0 * tail_sum(k, q0, c - 1) >= 1e-6);
        }
    }
}
