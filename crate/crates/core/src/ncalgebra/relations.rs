//! Defining relations of the sphere algebra, the derived relations of the
//! projective algebra, and a local-confluence check of the rewrite system.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{normalize, rewrite_pair, Generator, NCElement, RawElement, Word};
use crate::error::{Error, Result};
use crate::qpoly::LaurentPoly;

/// A relation `lhs = rhs`, kept unnormalized so it can also be represented.
#[derive(Clone, Debug)]
pub struct Relation {
    pub label: String,
    pub lhs: RawElement,
    pub rhs: RawElement,
}

impl Relation {
    /// `lhs - rhs` as a raw element.
    pub fn difference(&self) -> RawElement {
        self.lhs.clone().minus(&self.rhs)
    }

    pub fn residual(&self) -> Result<NCElement> {
        normalize(&self.difference())
    }
}

fn word2(a: Generator, b: Generator) -> Word {
    Word(vec![a, b])
}

fn one_minus_q2() -> LaurentPoly {
    LaurentPoly::one() - LaurentPoly::q_pow(2)
}

/// Every instance of the five relation families of `A(S^{2n+1}_q)`.
pub fn sphere_relations(n: usize) -> Vec<Relation> {
    use Generator as G;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in (i + 1)..=n {
            out.push(Relation {
                label: format!("(a) z{i} z{j} = q^-1 z{j} z{i}"),
                lhs: RawElement::word(n, word2(G::z(i), G::z(j))),
                rhs: RawElement::word(n, word2(G::z(j), G::z(i))).scaled(&LaurentPoly::q_pow(-1)),
            });
        }
    }
    for i in 0..=n {
        for j in (0..=n).filter(|&j| j != i) {
            out.push(Relation {
                label: format!("(b) z{i}* z{j} = q z{j} z{i}*"),
                lhs: RawElement::word(n, word2(G::zs(i), G::z(j))),
                rhs: RawElement::word(n, word2(G::z(j), G::zs(i))).scaled(&LaurentPoly::q_pow(1)),
            });
        }
    }
    for i in 0..n {
        let mut lhs = RawElement::word(n, word2(G::zs(i), G::z(i)));
        lhs.push(LaurentPoly::integer(-1), word2(G::z(i), G::zs(i)));
        let mut rhs = RawElement::new(n);
        for j in (i + 1)..=n {
            rhs.push(one_minus_q2(), word2(G::z(j), G::zs(j)));
        }
        out.push(Relation {
            label: format!("(c) [z{i}*, z{i}] = (1 - q^2) sum_(j>{i}) z_j z_j*"),
            lhs,
            rhs,
        });
    }
    let mut lhs = RawElement::word(n, word2(G::zs(n), G::z(n)));
    lhs.push(LaurentPoly::integer(-1), word2(G::z(n), G::zs(n)));
    out.push(Relation {
        label: format!("(d) [z{n}*, z{n}] = 0"),
        lhs,
        rhs: RawElement::new(n),
    });
    let mut lhs = RawElement::new(n);
    for i in 0..=n {
        lhs.push(LaurentPoly::one(), word2(G::z(i), G::zs(i)));
    }
    out.push(Relation {
        label: "(e) sum_i z_i z_i* = 1".to_string(),
        lhs,
        rhs: RawElement::scalar(n, LaurentPoly::one()),
    });
    out
}

/// The three displayed families of relations among the `p_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CpFamily {
    /// `p_ij p_kl = q^{sign(k-i)+sign(j-l)} p_kl p_ij` for `i != l`, `j != k`.
    Exchange,
    /// `p_ij p_jk` for `i != k`.
    Chain,
    /// `p_ij p_ji` for `i != j`.
    Transpose,
}

impl CpFamily {
    pub const ALL: [CpFamily; 3] = [CpFamily::Exchange, CpFamily::Chain, CpFamily::Transpose];

    pub fn arity(self) -> usize {
        match self {
            CpFamily::Exchange => 4,
            CpFamily::Chain => 3,
            CpFamily::Transpose => 2,
        }
    }

    fn admissible(self, idx: &[usize]) -> bool {
        match self {
            CpFamily::Exchange => idx[0] != idx[3] && idx[1] != idx[2],
            CpFamily::Chain => idx[0] != idx[2],
            CpFamily::Transpose => idx[0] != idx[1],
        }
    }
}

fn sign(a: usize, b: usize) -> i64 {
    // sign(a - b), with sign(0) = 0
    (a as i64 - b as i64).signum()
}

fn pp(n: usize, i: usize, j: usize, k: usize, l: usize) -> RawElement {
    RawElement::word(
        n,
        vec![Generator::zs(i), Generator::z(j), Generator::zs(k), Generator::z(l)],
    )
}

/// One instance of a projective relation family.
pub fn cp_relation(n: usize, family: CpFamily, idx: &[usize]) -> Result<Relation> {
    if idx.len() != family.arity() {
        return Err(Error::Precondition(format!(
            "{family:?} takes {} indices, got {}",
            family.arity(),
            idx.len()
        )));
    }
    if let Some(&bad) = idx.iter().find(|&&i| i > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    if !family.admissible(idx) {
        return Err(Error::Precondition(format!(
            "{family:?} relation is not claimed for indices {idx:?}"
        )));
    }
    let c = one_minus_q2();
    let rel = match family {
        CpFamily::Exchange => {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            Relation {
                label: format!("p{i}{j} p{k}{l}"),
                lhs: pp(n, i, j, k, l),
                rhs: pp(n, k, l, i, j).scaled(&LaurentPoly::q_pow(sign(k, i) + sign(j, l))),
            }
        }
        CpFamily::Chain => {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            let mut rhs = pp(n, j, k, i, j)
                .scaled(&LaurentPoly::q_pow(sign(j, i) + sign(j, k) + 1));
            for l in (j + 1)..=n {
                rhs = rhs.minus(&pp(n, i, l, l, k).scaled(&c));
            }
            Relation {
                label: format!("p{i}{j} p{j}{k}"),
                lhs: pp(n, i, j, j, k),
                rhs,
            }
        }
        CpFamily::Transpose => {
            let (i, j) = (idx[0], idx[1]);
            let w = LaurentPoly::q_pow(2 * sign(j, i));
            let mut rhs = pp(n, j, i, i, j).scaled(&w);
            for l in (i + 1)..=n {
                rhs = rhs.plus(&pp(n, j, l, l, j).scaled(&(&c * &w)));
            }
            for l in (j + 1)..=n {
                rhs = rhs.minus(&pp(n, i, l, l, i).scaled(&c));
            }
            Relation {
                label: format!("p{i}{j} p{j}{i}"),
                lhs: pp(n, i, j, j, i),
                rhs,
            }
        }
    };
    Ok(rel)
}

fn admissible_tuples(n: usize, family: CpFamily) -> Vec<Vec<usize>> {
    let arity = family.arity();
    let total = (n + 1).pow(arity as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![0; arity];
            for slot in v.iter_mut().rev() {
                *slot = code % (n + 1);
                code /= n + 1;
            }
            v
        })
        .filter(|v| family.admissible(v))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub indices: Vec<usize>,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub family: CpFamily,
    pub total: usize,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CpReport {
    pub n: usize,
    pub families: Vec<FamilyReport>,
}

impl CpReport {
    pub fn is_clean(&self) -> bool {
        self.families.iter().all(|f| f.violations.is_empty())
    }
}

/// Checks every admissible index tuple of each family, or a seeded sample of
/// `sample_budget` tuples per family when there are more than that.
pub fn verify_cp_relations(n: usize, sample_budget: usize) -> Result<CpReport> {
    if n == 0 {
        return Err(Error::Precondition("projective relations need n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut families = Vec::new();
    for family in CpFamily::ALL {
        let tuples = admissible_tuples(n, family);
        let total = tuples.len();
        let chosen: Vec<&Vec<usize>> = if total <= sample_budget {
            tuples.iter().collect()
        } else {
            let mut picks = sample(&mut rng, total, sample_budget).into_vec();
            picks.sort_unstable();
            picks.into_iter().map(|i| &tuples[i]).collect()
        };
        let mut violations = Vec::new();
        for idx in &chosen {
            let r = cp_relation(n, family, idx)?.residual()?;
            if !r.is_zero() {
                violations.push(Violation {
                    indices: idx.to_vec(),
                    residual: r.to_string(),
                });
            }
        }
        families.push(FamilyReport {
            family,
            total,
            checked: chosen.len(),
            violations,
        });
    }
    Ok(CpReport { n, families })
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub n: usize,
    pub ambiguities: usize,
    pub unresolved: Vec<String>,
}

/// Resolves every overlap ambiguity `a b c` where both `a b` and `b c` are
/// rewritable. All rule left-hand sides have length two, so these are the
/// only ambiguities; if all resolve, normal forms are unique.
pub fn check_overlaps(n: usize) -> Result<OverlapReport> {
    let letters: Vec<Generator> = (0..=n)
        .flat_map(|i| [Generator::z(i), Generator::zs(i)])
        .collect();
    let mut ambiguities = 0;
    let mut unresolved = Vec::new();
    for &a in &letters {
        for &b in &letters {
            let Some(left_rule) = rewrite_pair(n, a, b) else {
                continue;
            };
            for &c in &letters {
                let Some(right_rule) = rewrite_pair(n, b, c) else {
                    continue;
                };
                ambiguities += 1;
                let mut left = RawElement::new(n);
                for (k, w) in &left_rule {
                    left.push(k.clone(), w.concat(&Word(vec![c])));
                }
                let mut right = RawElement::new(n);
                for (k, w) in &right_rule {
                    right.push(k.clone(), Word(vec![a]).concat(w));
                }
                let diff = normalize(&left.minus(&right))?;
                if !diff.is_zero() {
                    unresolved.push(format!("{a} {b} {c}: {diff}"));
                }
            }
        }
    }
    Ok(OverlapReport {
        n,
        ambiguities,
        unresolved,
    })
}
