//! Truncations of the spectral triple `(A(CP^n_q), H_n ⊕ H_n, γ, D)` with
//! `D = |D| F` and `|D| |m⟩ = (m_1 + … + m_n)^{n/d} |m⟩`.

use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::khomology::{block_diagonal, grading, swap};
use crate::repspace::{rep_p, Parity, SparseOperator, TruncatedSpace};

#[derive(Clone, Debug, PartialEq)]
pub struct DiracOperator {
    pub n: usize,
    pub d: f64,
    pub space: TruncatedSpace,
    /// `|D|` on the basis of one copy of `H_n`.
    pub diagonal: Vec<f64>,
}

pub fn build_dirac(n: usize, d: f64, space: TruncatedSpace) -> Result<DiracOperator> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Precondition(format!("summability parameter must be positive, got {d}")));
    }
    if space.n() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: space.n(),
        });
    }
    let exponent = n as f64 / d;
    let diagonal = space
        .basis()
        .iter()
        .map(|m| match m.total() {
            0 => 0.0,
            t => (t as f64).powf(exponent),
        })
        .collect();
    Ok(DiracOperator {
        n,
        d,
        space,
        diagonal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiracReport {
    /// Nonzero entries of `D − D*`.
    pub selfadjoint: usize,
    /// Nonzero entries of `F² − 1`.
    pub f_squared: usize,
    /// Nonzero entries of `γD + Dγ`.
    pub anticommutator: usize,
    /// Dimension of `ker D` on the truncation.
    pub kernel: usize,
}

impl DiracReport {
    pub fn is_clean(&self) -> bool {
        self.selfadjoint == 0 && self.f_squared == 0 && self.anticommutator == 0
    }
}

impl DiracOperator {
    pub fn half_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn abs(&self) -> SparseOperator<f64> {
        SparseOperator::diagonal(self.diagonal.clone())
    }

    /// `|D| F = [[0, |D|], [|D|, 0]]`.
    pub fn operator(&self) -> SparseOperator<f64> {
        let abs = self.abs();
        block_diagonal(&abs, &abs).mul(&swap(self.half_dim()))
    }

    pub fn check(&self) -> DiracReport {
        let half = self.half_dim();
        let (d, f, g) = (self.operator(), swap(half), grading(half));
        DiracReport {
            selfadjoint: d.sub(&d.adjoint()).nnz(),
            f_squared: f.mul(&f).sub(&SparseOperator::identity(2 * half)).nnz(),
            anticommutator: g.mul(&d).add(&d.mul(&g)).nnz(),
            kernel: 2 * self.diagonal.iter().filter(|&&v| v == 0.0).count(),
        }
    }

    /// `[D, π_+(a) ⊕ π_−(a)]`.
    pub fn commutator(&self, pi: &SparseOperator<f64>) -> SparseOperator<f64> {
        let d = self.operator();
        d.mul(pi).sub(&pi.mul(&d))
    }
}

/// `|{m ∈ ℕ^n : Σ m_i = λ}|` by enumeration over the box, which holds every
/// such index once `λ ≤ cutoff`.
pub fn spectrum_multiplicity(n: usize, lambda: u64, cutoff: u32) -> Result<u64> {
    if lambda > cutoff as u64 {
        return Err(Error::IncompleteEnumeration { lambda, cutoff });
    }
    let space = TruncatedSpace::new(n, cutoff)?;
    Ok(space.basis().iter().filter(|m| m.total() == lambda).count() as u64)
}

/// `C(λ + n − 1, n − 1)`, the number of compositions of `λ` into `n` parts.
pub fn multiplicity_formula(n: usize, lambda: u64) -> u64 {
    if n == 0 {
        return u64::from(lambda == 0);
    }
    binomial(lambda + n as u64 - 1, n as u64 - 1)
}

/// Multiplicities for `λ = 0..=lambda_max` from one pass over the box.
pub fn spectrum(n: usize, lambda_max: u64, cutoff: u32) -> Result<Vec<u64>> {
    if lambda_max > cutoff as u64 {
        return Err(Error::IncompleteEnumeration {
            lambda: lambda_max,
            cutoff,
        });
    }
    let space = TruncatedSpace::new(n, cutoff)?;
    let mut counts = vec![0u64; lambda_max as usize + 1];
    for m in space.basis() {
        if let Some(c) = counts.get_mut(m.total() as usize) {
            *c += 1;
        }
    }
    Ok(counts)
}

/// `lambda,multiplicity` rows.
pub fn spectrum_csv(counts: &[u64]) -> String {
    let mut out = String::from("lambda,multiplicity\n");
    for (l, c) in counts.iter().enumerate() {
        out.push_str(&format!("{l},{c}\n"));
    }
    out
}

/// Coefficients `c_0, …, c_e` (lowest first) of the polynomial of least
/// degree through `(x, values[x])` for `x = 0, 1, …`, by exact Newton
/// interpolation. The zero sequence gives an empty vector.
pub fn fit_polynomial(values: &[i64]) -> Vec<BigRational> {
    // forward-difference table: diffs[r] = Δ^r f(0)
    let mut row: Vec<BigRational> = values.iter().map(|&v| BigRational::from_integer(v.into())).collect();
    let mut diffs = Vec::new();
    while !row.is_empty() {
        diffs.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    while diffs.last().is_some_and(Zero::is_zero) {
        diffs.pop();
    }
    // Σ_r Δ^r f(0) · C(x, r), with C(x, r) expanded one factor at a time
    let mut coeffs = vec![BigRational::zero(); diffs.len()];
    let mut basis = vec![BigRational::one()];
    for (r, dr) in diffs.iter().enumerate() {
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += dr * b;
        }
        // basis <- basis · (x − r) / (r + 1)
        let denom = BigRational::from_integer((r as i64 + 1).into());
        let shift = BigRational::from_integer((r as i64).into());
        let mut next = vec![BigRational::zero(); basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] += b / &denom;
            next[i] -= b * &shift / &denom;
        }
        basis = next;
    }
    coeffs
}

/// Degree of the least-degree interpolant, `None` for the zero sequence.
/// Meaningful only when `values` has more points than the degree.
pub fn polynomial_degree(values: &[i64]) -> Option<usize> {
    fit_polynomial(values).len().checked_sub(1)
}

/// `π_+(p_ij) ⊕ π_−(p_ij)` for the module at level `n` on `space`.
pub fn represent_p(n: usize, i: usize, j: usize, space: &TruncatedSpace, q0: f64) -> Result<SparseOperator<f64>> {
    let level_sum = |parity: Parity| -> Result<SparseOperator<f64>> {
        let mut out = SparseOperator::zero(space.dim());
        for k in parity.levels(n) {
            let op = if i <= j {
                rep_p::<f64>(n, k, i, j, space, &q0)?
            } else {
                rep_p::<f64>(n, k, j, i, space, &q0)?.adjoint()
            };
            out = out.add(&op);
        }
        Ok(out)
    };
    Ok(block_diagonal(&level_sum(Parity::Even)?, &level_sum(Parity::Odd)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub cutoff: u32,
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const POWER_TOLERANCE: f64 = 1e-8;
pub const POWER_MAX_ITERATIONS: usize = 20_000;

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Largest singular value of `a` by power iteration on `a* a` from a seeded
/// random start, stopped when the estimate changes by less than
/// [`POWER_TOLERANCE`] relative.
pub fn operator_norm(a: &SparseOperator<f64>, seed: u64) -> (f64, usize, bool) {
    if a.is_zero() {
        return (0.0, 0, true);
    }
    let at = a.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = norm2(&x);
    x.iter_mut().for_each(|v| *v /= len);
    let mut estimate = 0.0;
    for it in 1..=POWER_MAX_ITERATIONS {
        let y = at.apply(&a.apply(&x));
        let size = norm2(&y);
        if size == 0.0 {
            return (0.0, it, true);
        }
        let next = size.sqrt();
        x = y.into_iter().map(|v| v / size).collect();
        if (next - estimate).abs() <= POWER_TOLERANCE * next {
            return (next, it, true);
        }
        estimate = next;
    }
    (estimate, POWER_MAX_ITERATIONS, false)
}

/// `‖[D, π(p_ij)]‖` on the truncations at each cutoff, with `d = n`.
pub fn commutator_norm(
    i: usize,
    j: usize,
    n: usize,
    q0: f64,
    cutoffs: &[u32],
    seed: u64,
) -> Result<Vec<NormEstimate>> {
    if !(q0 > 0.0 && q0 < 1.0) {
        return Err(Error::DeformationOutOfRange(q0.to_string()));
    }
    if i.max(j) > n {
        return Err(Error::IndexOutOfRange { index: i.max(j), n });
    }
    cutoffs
        .par_iter()
        .map(|&cutoff| {
            let space = TruncatedSpace::new(n, cutoff)?;
            let pi = represent_p(n, i, j, &space, q0)?;
            let dirac = build_dirac(n, n as f64, space)?;
            let (norm, iterations, converged) = operator_norm(&dirac.commutator(&pi), seed);
            Ok(NormEstimate {
                cutoff,
                norm,
                iterations,
                converged,
            })
        })
        .collect()
}

/// `Σ_{1 ≤ λ ≤ cutoff} mult(λ) λ^{−s n/d}` over the nonzero eigenvalues
/// `λ^{n/d}` of `|D|` on one copy of `H_n`.
pub fn summability_trace(n: usize, d: f64, s: f64, cutoff: u64) -> Result<f64> {
    if s.is_nan() || s <= 0.0 {
        return Err(Error::Precondition(format!("exponent must be positive, got {s}")));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(Error::Precondition(format!("summability parameter must be positive, got {d}")));
    }
    let p = s * n as f64 / d;
    Ok((1..=cutoff)
        .map(|l| multiplicity_formula(n, l) as f64 * (l as f64).powf(-p))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Partial sums at `c` and `2c` agree to the tolerance.
    Convergent,
    /// The increment over `[c, 2c]` is no smaller than over `[c/2, c]`.
    Divergent,
    /// Increments shrink but are still above the tolerance.
    Undecided,
}

pub const CAUCHY_TOLERANCE: f64 = 1e-9;

/// Doubling-cutoff diagnostic for `summability_trace`. Terms behave like a
/// power of `λ`, so the increments over successive doublings form an
/// asymptotically geometric sequence whose ratio is at least 1 exactly when
/// the series diverges.
pub fn summability_verdict(n: usize, d: f64, s: f64, cutoff: u64) -> Result<Verdict> {
    let half = (cutoff / 2).max(1);
    let a = summability_trace(n, d, s, half)?;
    let b = summability_trace(n, d, s, 2 * half)?;
    let c = summability_trace(n, d, s, 4 * half)?;
    Ok(if (c - b).abs() < CAUCHY_TOLERANCE {
        Verdict::Convergent
    } else if c - b >= b - a {
        Verdict::Divergent
    } else {
        Verdict::Undecided
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repspace::{ConstraintSet, MultiIndex};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eigenvalues() {
        let space = TruncatedSpace::new(2, 3).unwrap();
        let dirac = build_dirac(2, 2.0, space.clone()).unwrap();
        let pos = space.position(&MultiIndex(vec![1, 2])).unwrap();
        assert_eq!(dirac.diagonal[pos], 3.0);
        assert_eq!(dirac.diagonal[0], 0.0);
        let one = build_dirac(1, 1.0, TruncatedSpace::new(1, 5).unwrap()).unwrap();
        assert_eq!(one.diagonal, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let report = dirac.check();
        assert!(report.is_clean());
        assert_eq!(report.kernel, 2);
        assert!(build_dirac(2, 0.0, space.clone()).is_err());
        assert!(build_dirac(1, 1.0, space).is_err());
    }

    #[test]
    fn fractional_summability_rescales() {
        let space = TruncatedSpace::new(2, 4).unwrap();
        let plain = build_dirac(2, 2.0, space.clone()).unwrap();
        let other = build_dirac(2, 4.0, space).unwrap();
        for (a, b) in plain.diagonal.iter().zip(&other.diagonal) {
            assert!((a.sqrt() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn multiplicities() {
        assert_eq!(spectrum_multiplicity(2, 3, 5).unwrap(), 4);
        for n in 1..=4 {
            assert_eq!(spectrum_multiplicity(n, 0, 3).unwrap(), 1);
        }
        for l in 0..=9 {
            assert_eq!(spectrum_multiplicity(1, l, 9).unwrap(), 1);
        }
        assert!(matches!(
            spectrum_multiplicity(2, 6, 5),
            Err(Error::IncompleteEnumeration { .. })
        ));
        let counts = spectrum(3, 8, 8).unwrap();
        for (l, &c) in counts.iter().enumerate() {
            assert_eq!(c, multiplicity_formula(3, l as u64));
        }
        assert!(spectrum_csv(&counts[..3]).starts_with("lambda,multiplicity\n0,1\n1,3\n2,6\n"));
    }

    #[test]
    fn exact_interpolation() {
        // (x + 1)(x + 2) / 2
        let v: Vec<i64> = (0..10).map(|x| (x + 1) * (x + 2) / 2).collect();
        assert_eq!(fit_polynomial(&v), vec![rat(1, 1), rat(3, 2), rat(1, 2)]);
        assert_eq!(polynomial_degree(&v), Some(2));
        assert_eq!(polynomial_degree(&[5, 5, 5]), Some(0));
        assert_eq!(polynomial_degree(&[0, 0]), None);
    }

    #[test]
    fn weighted_shift_norm_is_largest_weight() {
        // weights shaped like the commutator entries m q^{2m}
        let mut a = SparseOperator::<f64>::zero(50);
        for i in 0..49 {
            let m = i as f64;
            a.add_entry(i + 1, i, (m + 3.0) * 0.7f64.powf(2.0 * m) - 0.5 * (i % 3) as f64);
        }
        let expect = a.max_abs();
        let (norm, _, converged) = operator_norm(&a, 7);
        assert!(converged);
        assert!((norm - expect).abs() < 1e-6 * expect, "{norm} vs {expect}");
    }

    #[test]
    fn shifts_are_eigenvectors_of_abs_commutator() {
        let n = 3;
        let space = TruncatedSpace::new(n, 4).unwrap();
        let dirac = build_dirac(n, n as f64, space.clone()).unwrap();
        let abs = dirac.abs();
        for (i, k) in [(0, 3), (1, 3), (0, 1), (2, 2)] {
            let mut shift = SparseOperator::<f64>::zero(space.dim());
            for (col, m) in space.basis().iter().enumerate() {
                if let Some(row) = space.position(&m.raised(i, k)) {
                    shift.add_entry(row, col, 1.0);
                }
            }
            let comm = abs.mul(&shift).sub(&shift.mul(&abs));
            assert_eq!(comm, shift.scale(&((k - i) as f64)));
        }
    }

    #[test]
    fn commutator_of_diagonal_generator() {
        // n = 1: π_+(p_11) = 0 and π_-(p_11) = q^{2m}, so the norm is max_m m q^{2m}
        let q0 = 0.5;
        let r = commutator_norm(1, 1, 1, q0, &[20, 40], 1).unwrap();
        for e in &r {
            assert!(e.converged);
            assert!((e.norm - 0.25).abs() < 1e-7, "{e:?}");
        }
        let off = commutator_norm(0, 2, 2, q0, &[5], 1).unwrap();
        assert!(off[0].norm > 0.0);
        assert_eq!(operator_norm(&SparseOperator::zero(4), 1), (0.0, 0, true));
        assert!(commutator_norm(0, 3, 2, q0, &[5], 1).is_err());
    }

    #[test]
    fn commutator_norms_stabilize_n1() {
        let r = commutator_norm(0, 1, 1, 0.5, &[20, 40, 80], 3).unwrap();
        let (a, b) = (r[1].norm, r[2].norm);
        assert!((a - b).abs() <= 0.01 * b, "{r:?}");
    }

    #[test]
    fn difference_decays_along_overlaps() {
        let q0 = 0.5;
        for n in 1..=3 {
            let space = TruncatedSpace::new(n, 9).unwrap();
            let half = space.dim();
            for i in 0..=n {
                for j in 0..=n {
                    let pi = represent_p(n, i, j, &space, q0).unwrap();
                    let mut diff = SparseOperator::<f64>::zero(half);
                    for (r, c, v) in pi.entries() {
                        if r < half {
                            diff.add_entry(r, c, *v);
                        } else {
                            diff.add_entry(r - half, c - half, -v);
                        }
                    }
                    for k in 1..=n {
                        for (col, m) in space.members(ConstraintSet::Overlap(k)) {
                            let bound = 2.0 * q0.powi(m.get(k) as i32);
                            let worst = diff.restrict_cols(|c| c == col).max_abs();
                            assert!(worst <= bound, "n={n} p_{i}{j} at {m}: {worst} > {bound}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zeta_two() {
        let s = summability_trace(1, 1.0, 2.0, 1000).unwrap();
        assert!((s - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-2);
        assert_eq!(summability_verdict(1, 1.0, 20.0, 100).unwrap(), Verdict::Convergent);
        assert_eq!(summability_verdict(2, 2.0, 1.5, 1000).unwrap(), Verdict::Divergent);
        assert_eq!(summability_verdict(2, 2.0, 1.0, 1000).unwrap(), Verdict::Divergent);
        assert_eq!(summability_verdict(2, 2.0, 3.0, 1000).unwrap(), Verdict::Undecided);
        assert!(summability_trace(1, 1.0, 0.0, 10).is_err());
    }
}
