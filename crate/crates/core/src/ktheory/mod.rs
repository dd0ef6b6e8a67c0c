//! Isometry vectors `Ψ_N` and the projections `P_N = Ψ_N Ψ_N^†`.
//!
//! Components carry a square root of a q-multinomial, kept unexpanded as a
//! radicand: `ψ_a = √R_a · c_a · x_a` with `R_a` a Laurent polynomial, `c_a` a
//! power of `q` and `x_a` a monomial in the generators.

mod roots;

pub use roots::RootElement;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ncalgebra::{normalize, Generator, NCElement, RawElement, Word};
use crate::qpoly::{qmultinomial, LaurentPoly};

/// One entry `√radicand · outer · word` of an isometry vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// The multi-degree `(j_0, …, j_n)`.
    pub degree: Vec<i64>,
    pub radicand: LaurentPoly,
    pub outer: LaurentPoly,
    pub word: NCElement,
}

impl Component {
    pub fn element(&self) -> RootElement {
        RootElement::new(vec![self.radicand.clone()], self.word.scale(&self.outer))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryVector {
    pub n: usize,
    pub big_n: i64,
    pub components: Vec<Component>,
}

/// All `(j_0, …, j_n)` with nonnegative entries summing to `total`, in
/// lexicographic order.
pub fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    fn go(total: i64, parts: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

fn cross_sum(j: &[i64]) -> i64 {
    let mut s = 0;
    for r in 0..j.len() {
        for t in (r + 1)..j.len() {
            s += j[r] * j[t];
        }
    }
    s
}

fn weighted_sum(j: &[i64]) -> i64 {
    j.iter().enumerate().map(|(r, &x)| r as i64 * x).sum()
}

fn power_word(n: usize, j: &[i64], starred: bool, descending: bool) -> Result<NCElement> {
    let mut letters = Vec::new();
    let order: Vec<usize> = if descending {
        (0..=n).rev().collect()
    } else {
        (0..=n).collect()
    };
    for r in order {
        for _ in 0..j[r] {
            letters.push(Generator {
                index: r,
                starred,
            });
        }
    }
    normalize(&RawElement::word(n, Word(letters)))
}

fn check_degree(big_n: i64) -> Result<()> {
    if big_n < 1 {
        return Err(Error::Precondition(format!("degree must be positive, got {big_n}")));
    }
    Ok(())
}

/// `Ψ_N` for `N ≥ 1`, with components `[j]!^{1/2} q^{-½Σ_{r<s} j_r j_s} (z_n^{j_n} ⋯ z_0^{j_0})^*`.
pub fn psi(big_n: i64, n: usize) -> Result<IsometryVector> {
    check_degree(big_n)?;
    let mut components = Vec::new();
    for j in compositions(big_n, n + 1) {
        let m = qmultinomial(&j)?;
        let w = power_word(n, &j, false, true)?.star();
        components.push(Component {
            radicand: m.shift(-cross_sum(&j)),
            outer: LaurentPoly::one(),
            word: w,
            degree: j,
        });
    }
    Ok(IsometryVector {
        n,
        big_n,
        components,
    })
}

/// `Ψ_{-N}` for `N ≥ 1`, with components
/// `[j]!^{1/2} q^{½Σ_{r<s} j_r j_s + Σ_r r j_r} z_0^{j_0} ⋯ z_n^{j_n}`.
pub fn psi_neg(big_n: i64, n: usize) -> Result<IsometryVector> {
    check_degree(big_n)?;
    let mut components = Vec::new();
    for j in compositions(big_n, n + 1) {
        let m = qmultinomial(&j)?;
        components.push(Component {
            radicand: m.shift(cross_sum(&j)),
            outer: LaurentPoly::q_pow(weighted_sum(&j)),
            word: power_word(n, &j, false, false)?,
            degree: j,
        });
    }
    Ok(IsometryVector {
        n,
        big_n: -big_n,
        components,
    })
}

/// `Ψ_N` for any signed degree; `Ψ_0 = (1)`.
pub fn isometry(big_n: i64, n: usize) -> Result<IsometryVector> {
    match big_n {
        0 => Ok(IsometryVector {
            n,
            big_n: 0,
            components: vec![Component {
                degree: vec![0; n + 1],
                radicand: LaurentPoly::one(),
                outer: LaurentPoly::one(),
                word: NCElement::one(n),
            }],
        }),
        d if d > 0 => psi(d, n),
        d => psi_neg(-d, n),
    }
}

impl IsometryVector {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `Ψ^†Ψ = Σ_a ψ_a^* ψ_a`, which should be the unit.
    pub fn gram(&self) -> Result<RootElement> {
        let mut acc = RootElement::zero(self.n);
        for c in &self.components {
            let e = c.element();
            acc = acc.checked_add(&e.star().checked_mul(&e)?)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionMatrix {
    pub n: usize,
    pub big_n: i64,
    pub degrees: Vec<Vec<i64>>,
    pub entries: Vec<Vec<RootElement>>,
    source: IsometryVector,
}

/// `P_N = Ψ_N Ψ_N^†`, entry `(a, b) = ψ_a ψ_b^*`.
pub fn projection(big_n: i64, n: usize) -> Result<ProjectionMatrix> {
    let source = isometry(big_n, n)?;
    let elems: Vec<RootElement> = source.components.iter().map(Component::element).collect();
    let stars: Vec<RootElement> = elems.iter().map(RootElement::star).collect();
    let entries = elems
        .par_iter()
        .map(|a| stars.iter().map(|b| a.checked_mul(b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectionMatrix {
        n,
        big_n,
        degrees: source.components.iter().map(|c| c.degree.clone()).collect(),
        entries,
        source,
    })
}

/// How `P²` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareMethod {
    /// `Σ_b P_ab P_bc` for every entry.
    Entrywise,
    /// `ψ_a (Ψ^†Ψ) ψ_c^*`, the same product regrouped by associativity.
    Factored,
}

/// Largest `|N|` for which [`verify_projection`] multiplies entrywise.
pub const ENTRYWISE_MAX_DEGREE: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: i64,
    pub size: usize,
    /// Words left in `Ψ^†Ψ - 1`.
    pub isometry_residual: usize,
    /// Words left in `P² - P`, summed over entries.
    pub idempotent_residual: usize,
    pub square_method: SquareMethod,
    /// Words left in `P - P^*`, summed over entries.
    pub selfadjoint_residual: usize,
}

impl ProjectionReport {
    pub fn is_clean(&self) -> bool {
        self.isometry_residual == 0 && self.idempotent_residual == 0 && self.selfadjoint_residual == 0
    }
}

impl ProjectionMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn isometry(&self) -> &IsometryVector {
        &self.source
    }

    /// Diagonal entries are free of square roots.
    pub fn diagonal(&self) -> Vec<NCElement> {
        (0..self.size())
            .map(|a| {
                self.entries[a][a]
                    .as_exact()
                    .expect("diagonal radicands pair off")
            })
            .collect()
    }

    /// `Σ_a P_aa`.
    pub fn matrix_trace(&self) -> NCElement {
        self.diagonal()
            .iter()
            .fold(NCElement::zero(self.n), |acc, x| &acc + x)
    }

    /// `P²` as `ψ_a (Ψ^†Ψ) ψ_c^*`.
    pub fn square_factored(&self) -> Result<Vec<Vec<RootElement>>> {
        let gram = self.source.gram()?;
        let elems: Vec<RootElement> = self.source.components.iter().map(Component::element).collect();
        elems
            .par_iter()
            .map(|a| {
                let left = a.checked_mul(&gram)?;
                elems.iter().map(|c| left.checked_mul(&c.star())).collect()
            })
            .collect()
    }

    /// `P²` entry by entry.
    pub fn square(&self) -> Result<Vec<Vec<RootElement>>> {
        let size = self.size();
        (0..size)
            .into_par_iter()
            .map(|a| {
                (0..size)
                    .map(|c| {
                        let mut acc = RootElement::zero(self.n);
                        for b in 0..size {
                            acc = acc.checked_add(&self.entries[a][b].checked_mul(&self.entries[b][c])?)?;
                        }
                        Ok(acc)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "qcpn.projection/1",
            "n": self.n,
            "N": self.big_n,
            "size": self.size(),
            "degrees": self.degrees,
            "entries": self
                .entries
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Checks `Ψ^†Ψ = 1`, `P² = P` and `P = P^*` after normalization, squaring
/// entrywise up to degree [`ENTRYWISE_MAX_DEGREE`].
pub fn verify_projection(p: &ProjectionMatrix) -> Result<ProjectionReport> {
    let method = if p.big_n.abs() <= ENTRYWISE_MAX_DEGREE {
        SquareMethod::Entrywise
    } else {
        SquareMethod::Factored
    };
    verify_projection_with(p, method)
}

pub fn verify_projection_with(p: &ProjectionMatrix, method: SquareMethod) -> Result<ProjectionReport> {
    let one = RootElement::exact(NCElement::one(p.n));
    let isometry_residual = p.source.gram()?.checked_sub(&one)?.num_terms();
    let sq = match method {
        SquareMethod::Entrywise => p.square()?,
        SquareMethod::Factored => p.square_factored()?,
    };
    let mut idempotent_residual = 0;
    let mut selfadjoint_residual = 0;
    for a in 0..p.size() {
        for b in 0..p.size() {
            idempotent_residual += sq[a][b].checked_sub(&p.entries[a][b])?.num_terms();
            selfadjoint_residual += p.entries[a][b]
                .checked_sub(&p.entries[b][a].star())?
                .num_terms();
        }
    }
    Ok(ProjectionReport {
        n: p.n,
        big_n: p.big_n,
        size: p.size(),
        isometry_residual,
        idempotent_residual,
        square_method: method,
        selfadjoint_residual,
    })
}

/// `Σ_a q^{2w(a)} P_aa` with row weight `w(a) = Σ_r r j_r`; on `P_1` this
/// is `Σ_i q^{2i} p_ii`.
pub fn qtrace(p: &ProjectionMatrix) -> NCElement {
    p.diagonal()
        .iter()
        .zip(&p.degrees)
        .fold(NCElement::zero(p.n), |acc, (x, j)| {
            &acc + &x.scale(&LaurentPoly::q_pow(2 * weighted_sum(j)))
        })
}
