use std::collections::BTreeMap;

use serde::Serialize;

use super::{Scalar, TruncatedSpace};

/// A square matrix stored as a coordinate map `(row, col) → entry`, with no
/// stored zeros. Entries are real, so the adjoint is the transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<S: Scalar> {
    dim: usize,
    entries: BTreeMap<(usize, usize), S>,
}

#[derive(Serialize)]
struct EntryRecord {
    row: usize,
    col: usize,
    value: f64,
    exact: String,
}

#[derive(Serialize)]
struct OperatorRecord<'a> {
    n: usize,
    cutoff: u32,
    dim: usize,
    basis: Vec<&'a [u32]>,
    entries: Vec<EntryRecord>,
}

impl<S: Scalar> SparseOperator<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| S::one()).collect())
    }

    pub fn diagonal(values: Vec<S>) -> Self {
        let mut out = Self::zero(values.len());
        for (i, v) in values.into_iter().enumerate() {
            out.add_entry(i, i, v);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn add_entry(&mut self, row: usize, col: usize, v: S) {
        assert!(row < self.dim && col < self.dim, "entry outside the matrix");
        if v.is_zero() {
            return;
        }
        match self.entries.entry((row, col)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&v);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.dim);
        for (&(r, col), v) in &self.entries {
            out.add_entry(r, col, v.mul(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_entry(r, c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&S::one().neg()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut by_col: BTreeMap<usize, Vec<(usize, &S)>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            by_col.entry(c).or_default().push((r, v));
        }
        let mut out = Self::zero(self.dim);
        for (&(mid, c), b) in &other.entries {
            if let Some(col) = by_col.get(&mid) {
                for &(r, a) in col {
                    out.add_entry(r, c, a.mul(b));
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    pub fn trace(&self) -> S {
        self.entries
            .iter()
            .filter(|((r, c), _)| r == c)
            .fold(S::zero(), |acc, (_, v)| acc.add(v))
    }

    /// Applies the operator to a dense vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for (&(r, c), v) in &self.entries {
            y[r] += v.to_f64() * x[c];
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Entries whose column satisfies `keep`.
    pub fn restrict_cols(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .filter(|((_, c), _)| keep(*c))
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }

    pub fn to_f64(&self) -> SparseOperator<f64> {
        let mut out = SparseOperator::zero(self.dim);
        for (&(r, c), v) in &self.entries {
            out.add_entry(r, c, v.to_f64());
        }
        out
    }

    pub fn to_json(&self, space: &TruncatedSpace) -> serde_json::Value {
        let record = OperatorRecord {
            n: space.n(),
            cutoff: space.cutoff(),
            dim: self.dim,
            basis: space.basis().iter().map(|m| m.0.as_slice()).collect(),
            entries: self
                .entries()
                .map(|(row, col, v)| EntryRecord {
                    row,
                    col,
                    value: v.to_f64(),
                    exact: v.to_string(),
                })
                .collect(),
        };
        serde_json::to_value(record).expect("operator records serialize")
    }

    /// Coordinate-list text: a basis header, then `row col value` lines.
    pub fn to_text(&self, space: &TruncatedSpace) -> String {
        let mut out = format!("# n={} cutoff={} dim={}\n", space.n(), space.cutoff(), self.dim);
        for (i, m) in space.basis().iter().enumerate() {
            out.push_str(&format!("# {i} {m}\n"));
        }
        for (r, c, v) in self.entries() {
            out.push_str(&format!("{r} {c} {v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_arithmetic() {
        let mut a = SparseOperator::<f64>::zero(3);
        a.add_entry(0, 1, 2.0);
        a.add_entry(2, 0, 1.0);
        let b = a.adjoint();
        assert_eq!(b.get(1, 0), 2.0);
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), 4.0);
        assert_eq!(ab.get(2, 2), 1.0);
        assert_eq!(ab.nnz(), 2);
        assert!(a.sub(&a).is_zero());
        assert_eq!(ab.trace(), 5.0);
        assert_eq!(SparseOperator::<f64>::identity(3).mul(&a), a);
        assert_eq!(a.apply(&[1.0, 1.0, 1.0]), vec![2.0, 0.0, 1.0]);
        a.add_entry(0, 1, -2.0);
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn export_formats() {
        let space = TruncatedSpace::new(1, 1).unwrap();
        let mut a = SparseOperator::<f64>::zero(2);
        a.add_entry(1, 0, 0.5);
        let j = a.to_json(&space);
        assert_eq!(j["basis"], serde_json::json!([[0], [1]]));
        assert_eq!(j["entries"][0]["row"], 1);
        let t = a.to_text(&space);
        assert!(t.ends_with("1 0 0.5\n"));
    }
}
