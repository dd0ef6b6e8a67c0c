//! Even Fredholm modules `μ_k` over `A(CP^n_q)` and their index pairing with
//! the line-bundle projections `P_{−N}`.

mod trace;

pub use trace::{
    cutoff_for_tail, for_each_overlap, level_sums, overlap_count, shell_sums, tail_sum,
    truncated_trace, Evaluated, TraceEstimate,
};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ktheory::isometry;
use crate::ncalgebra::NCElement;
use crate::repspace::{rep_pm, Parity, SparseOperator, TruncatedSpace};
use trace::check_q;

/// Tail bound targeted when no cutoff is given.
pub const DEFAULT_TAIL: f64 = 1e-6;

/// `(A(CP^n_q), H_k ⊕ H_k, π_+ ⊕ π_−, γ, F)` with `H_k = ℓ²(ℕ^k)` truncated to
/// a box. `π_±` are the sums of the level-`j` representations of
/// `A(S^{2k+1}_q)` over even and odd `j`, pulled back along `z_m ↦ 0` for
/// `m > k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FredholmModule {
    pub n: usize,
    pub k: usize,
    pub space: TruncatedSpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModuleReport {
    /// Nonzero entries of `F² − 1`.
    pub f_squared: usize,
    /// Nonzero entries of `F − F*`.
    pub f_selfadjoint: usize,
    /// Nonzero entries of `Fγ + γF`.
    pub anticommutator: usize,
}

impl ModuleReport {
    pub fn is_clean(&self) -> bool {
        self.f_squared == 0 && self.f_selfadjoint == 0 && self.anticommutator == 0
    }
}

/// The swap `[[0, 1], [1, 0]]` on `H ⊕ H` for `dim H = half`.
pub fn swap(half: usize) -> SparseOperator<f64> {
    let mut f = SparseOperator::zero(2 * half);
    for i in 0..half {
        f.add_entry(i, half + i, 1.0);
        f.add_entry(half + i, i, 1.0);
    }
    f
}

/// `diag(1, −1)` on `H ⊕ H`.
pub fn grading(half: usize) -> SparseOperator<f64> {
    SparseOperator::diagonal((0..2 * half).map(|i| if i < half { 1.0 } else { -1.0 }).collect())
}

/// `a ⊕ b`.
pub fn block_diagonal(a: &SparseOperator<f64>, b: &SparseOperator<f64>) -> SparseOperator<f64> {
    assert_eq!(a.dim(), b.dim(), "block size mismatch");
    let half = a.dim();
    let mut out = SparseOperator::zero(2 * half);
    for (r, c, v) in a.entries() {
        out.add_entry(r, c, *v);
    }
    for (r, c, v) in b.entries() {
        out.add_entry(half + r, half + c, *v);
    }
    out
}

/// The module `μ_k` over `A(CP^n_q)`, with `H_k` cut to `m_i ≤ cutoff`. At
/// `k = 0` the space is one-dimensional and `π_+` is the classical point.
pub fn pullback_module(k: usize, n: usize, cutoff: u32) -> Result<FredholmModule> {
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    Ok(FredholmModule {
        n,
        k,
        space: TruncatedSpace::new(k, cutoff)?,
    })
}

impl FredholmModule {
    /// Dimension of one copy of the truncated `H_k`.
    pub fn half_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn grading(&self) -> SparseOperator<f64> {
        grading(self.half_dim())
    }

    pub fn swap(&self) -> SparseOperator<f64> {
        swap(self.half_dim())
    }

    /// The image of `a ∈ A(CP^n_q)` under the chain of `z_m ↦ 0` maps.
    pub fn pullback(&self, a: &NCElement) -> Result<NCElement> {
        if a.ambient() != self.n {
            return Err(Error::AmbientMismatch {
                left: a.ambient(),
                right: self.n,
            });
        }
        a.drop_to(self.k)
    }

    /// `(π_+(a), π_−(a))` on the truncated `H_k`.
    pub fn represent(&self, a: &NCElement, q0: f64) -> Result<(SparseOperator<f64>, SparseOperator<f64>)> {
        check_q(q0)?;
        let x = self.pullback(a)?;
        Ok((
            rep_pm(&x, Parity::Even, &self.space, &q0)?,
            rep_pm(&x, Parity::Odd, &self.space, &q0)?,
        ))
    }

    /// `π_+(a) ⊕ π_−(a)` on the doubled space.
    pub fn represent_doubled(&self, a: &NCElement, q0: f64) -> Result<SparseOperator<f64>> {
        let (plus, minus) = self.represent(a, q0)?;
        Ok(block_diagonal(&plus, &minus))
    }

    /// Exact checks of `F² = 1`, `F = F*` and `Fγ = −γF` on the truncation.
    pub fn check(&self) -> ModuleReport {
        let (f, g) = (self.swap(), self.grading());
        let id = SparseOperator::identity(f.dim());
        ModuleReport {
            f_squared: f.mul(&f).sub(&id).nnz(),
            f_selfadjoint: f.sub(&f.adjoint()).nnz(),
            anticommutator: f.mul(&g).add(&g.mul(&f)).nnz(),
        }
    }

    /// Truncated `Tr(π_+ − π_−)(a)` with its tail bound.
    pub fn trace_difference(&self, a: &NCElement, q0: f64) -> Result<TraceEstimate> {
        trace_difference(a, self.k, q0, self.space.cutoff())
    }
}

/// `a` pulled back to level `k` with coefficients evaluated at `q0`.
pub fn evaluate(a: &NCElement, k: usize, q0: f64) -> Result<Evaluated> {
    check_q(q0)?;
    let x = a.drop_to(k)?;
    let terms = x
        .terms()
        .map(|(w, c)| Ok((c.eval_f64(q0)?, w.clone())))
        .collect::<Result<_>>()?;
    Ok(Evaluated { k, terms })
}

/// Truncated trace of `(π_+ − π_−)(a)` on `ℓ²(ℕ^k)` for `a ∈ A(CP^n_q)`, over
/// the box `m_i ≤ cutoff`, with the bound `C Σ_{t>cutoff} (shell size) q0^t`
/// on what the box leaves out.
pub fn trace_difference(a: &NCElement, k: usize, q0: f64, cutoff: u32) -> Result<TraceEstimate> {
    truncated_trace(&evaluate(a, k, q0)?, q0, cutoff)
}

/// `Tr P_{−N} = Σ_a ψ_a ψ_a^*` over the components of `Ψ_{−N}` on `CP^n`,
/// pulled back to level `k` and evaluated at `q0`. Components carrying some
/// `z_m` with `m > k` are killed by the pullback; the rest are kept as the
/// unnormalized words `w_a w_a^*` with weights `R_a(q0) · outer_a(q0)²`.
pub fn projection_trace(n: usize, k: usize, big_n: u32, q0: f64) -> Result<Evaluated> {
    check_q(q0)?;
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let iso = isometry(-(big_n as i64), n)?;
    let mut terms = Vec::new();
    for comp in &iso.components {
        if comp.degree.iter().skip(k + 1).any(|&j| j > 0) {
            continue;
        }
        let scale = comp.radicand.eval_f64(q0)? * comp.outer.eval_f64(q0)?.powi(2);
        for (w, c) in comp.word.terms() {
            terms.push((scale * c.eval_f64(q0)?.powi(2), w.concat(&w.star())));
        }
    }
    Ok(Evaluated { k, terms })
}

/// `⟨[μ_k], [P_{−N}]⟩` with its certification data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingResult {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub q: f64,
    pub cutoff: u32,
    pub value: f64,
    pub tail: f64,
    pub rounded: i64,
    pub certified: bool,
}

impl PairingResult {
    pub fn distance(&self) -> f64 {
        (self.value - self.rounded as f64).abs()
    }
}

/// The index pairing over the box `m_i ≤ cutoff`; with no cutoff, the
/// smallest one whose tail bound is below [`DEFAULT_TAIL`]. The rounded
/// value is certified when `|value − rounded| + tail < 1/2`.
pub fn pairing(n: usize, k: usize, big_n: u32, q0: f64, cutoff: Option<u32>) -> Result<PairingResult> {
    let x = projection_trace(n, k, big_n, q0)?;
    let cutoff = match cutoff {
        Some(c) => c,
        None => cutoff_for_tail(x.bound_constant(), k, q0, DEFAULT_TAIL),
    };
    let est = truncated_trace(&x, q0, cutoff)?;
    let rounded = est.value.round() as i64;
    let certified = (est.value - rounded as f64).abs() + est.tail < 0.5;
    Ok(PairingResult {
        n,
        k,
        big_n,
        q: q0,
        cutoff,
        value: est.value,
        tail: est.tail,
        rounded,
        certified,
    })
}

/// As [`pairing`], failing unless the rounding is certified.
pub fn certified_pairing(n: usize, k: usize, big_n: u32, q0: f64, cutoff: Option<u32>) -> Result<PairingResult> {
    let r = pairing(n, k, big_n, q0, cutoff)?;
    if r.certified {
        Ok(r)
    } else {
        Err(Error::Uncertified {
            k,
            big_n: big_n as usize,
            value: r.value,
            tail: r.tail,
        })
    }
}

/// `M_{ij} = ⟨[μ_i], [P_{−j}]⟩` for `0 ≤ i, j ≤ n`, next to the inverse
/// `(−1)^{i+j} C(j, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingMatrix {
    pub n: usize,
    pub entries: Vec<Vec<PairingResult>>,
    pub matrix: Vec<Vec<BigInt>>,
    pub inverse: Vec<Vec<BigInt>>,
}

/// `(−1)^{i+j} C(j, i)`, zero below the diagonal.
pub fn inverse_entry(i: usize, j: usize) -> BigInt {
    let b = binomial(BigInt::from(j), BigInt::from(i));
    if (i + j).is_multiple_of(2) {
        b
    } else {
        -b
    }
}

pub fn pairing_matrix(n: usize, q0: f64, cutoff: Option<u32>) -> Result<PairingMatrix> {
    let mut entries = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let row = (0..=n)
            .map(|j| certified_pairing(n, i, j as u32, q0, cutoff))
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    let matrix = entries
        .iter()
        .map(|row| row.iter().map(|r| BigInt::from(r.rounded)).collect())
        .collect();
    let inverse = (0..=n)
        .map(|i| (0..=n).map(|j| inverse_entry(i, j)).collect())
        .collect();
    Ok(PairingMatrix {
        n,
        entries,
        matrix,
        inverse,
    })
}

fn int_product(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..b.len()).map(|l| &a[i][l] * &b[l][j]).sum())
                .collect()
        })
        .collect()
}

fn is_identity(m: &[Vec<BigInt>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| if i == j { *v == BigInt::from(1) } else { v.is_zero() })
    })
}

impl PairingMatrix {
    /// `M_{ij} = C(j, i)`.
    pub fn is_binomial(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, v)| *v == binomial(BigInt::from(j), BigInt::from(i)))
        })
    }

    /// `M·M⁻¹ = M⁻¹·M = I` over the integers.
    pub fn inverse_checks(&self) -> bool {
        is_identity(&int_product(&self.matrix, &self.inverse))
            && is_identity(&int_product(&self.inverse, &self.matrix))
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        let mut a = self.matrix.clone();
        let size = a.len();
        let mut sign = BigInt::from(1);
        let mut prev = BigInt::from(1);
        for p in 0..size {
            let Some(pivot) = (p..size).find(|&r| !a[r][p].is_zero()) else {
                return BigInt::zero();
            };
            if pivot != p {
                a.swap(pivot, p);
                sign = -sign;
            }
            for r in p + 1..size {
                for c in p + 1..size {
                    a[r][c] = (&a[r][c] * &a[p][p] - &a[r][p] * &a[p][c]) / &prev;
                }
                a[r][p] = BigInt::zero();
            }
            prev = a[p][p].clone();
        }
        sign * &a[size - 1][size - 1]
    }
}

/// `Σ_{k=j}^{i} (−1)^{j+k} C(i, k) C(k, j)`, which is `δ_{ij}` for `j ≤ i`.
pub fn alternating_sum_identity(i: usize, j: usize) -> BigInt {
    (j..=i)
        .map(|k| {
            let t = binomial(BigInt::from(i), BigInt::from(k)) * binomial(BigInt::from(k), BigInt::from(j));
            if (j + k).is_multiple_of(2) {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// `|{N > m_1 > … > m_k ≥ 0}|` by enumeration: the count the pairing reduces to
/// as `q → 0`.
pub fn q_zero_count(big_n: u32, k: usize) -> u64 {
    fn go(below: u32, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        (0..below).map(|m| go(m, left - 1)).sum()
    }
    go(big_n, k)
}

/// Estimate of the per-step decay rate `ρ` of the partial traces: with
/// `v(c)` the truncated trace, `ρ = (|v(4c) − v(2c)| / |v(2c) − v(c)|)^{1/c}`.
pub fn doubling_ratio(x: &Evaluated, q0: f64, cutoff: u32) -> Result<f64> {
    let shells = shell_sums(x, q0, 4 * cutoff)?;
    let partial = |c: u32| -> f64 { shells[..=c as usize].iter().sum() };
    let (a, b, c) = (partial(cutoff), partial(2 * cutoff), partial(4 * cutoff));
    Ok(((c - b).abs() / (b - a).abs()).powf(1.0 / cutoff as f64))
}
