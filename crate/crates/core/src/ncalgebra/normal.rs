//! Oriented rewrite system for `A(S^{2n+1}_q)`.
//!
//! Rules, for a pair of adjacent letters:
//!
//! ```text
//! z_j  z_i   -> q z_i z_j                                  (j > i)
//! z_i* z_j*  -> q z_j* z_i*                                (i < j)
//! z_j* z_i   -> q z_i z_j*                                 (i != j)
//! z_i* z_i   -> z_i z_i* + (1 - q^2) sum_{l > i} z_l z_l*   (i < n)
//! z_n* z_n   -> z_n z_n*
//! z_n  z_n*  -> 1 - sum_{i < n} z_i z_i*
//! ```
//!
//! Each rule either removes a starred-before-unstarred inversion, keeps that
//! count and lowers the `z_n`-degree, or keeps both and removes an index
//! inversion, so rewriting terminates. Local confluence is checked by
//! [`super::relations::check_overlaps`].
//!
//! Normal words are `z^a z*^b` (unstarred ascending, starred descending, no
//! `z_n z_n*` at the junction) and are handled by their exponent vectors. A
//! product of normal words only needs the normal form of `z*^b z^a`; that is
//! built one unstarred letter at a time by recursion on the degree, memoized
//! per thread, while merging runs of like letters is a pure power of `q`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::{Generator, NCElement, Word};
use crate::error::{Error, Result};
use crate::qpoly::LaurentPoly;

/// A normal word `z_0^{a_0} ⋯ z_n^{a_n} z_n*^{b_n} ⋯ z_0*^{b_0}` with
/// `min(a_n, b_n) = 0`, by its exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Mono {
    a: Vec<u32>,
    b: Vec<u32>,
}

type Sum = Rc<Vec<(Mono, LaurentPoly)>>;

thread_local! {
    static STAR_PAST: RefCell<HashMap<(Vec<u32>, usize), Sum>> = RefCell::new(HashMap::new());
    static BLOCK_PAST: RefCell<HashMap<(Vec<u32>, Vec<u32>), Sum>> = RefCell::new(HashMap::new());
    static JUNCTION: RefCell<HashMap<Mono, Sum>> = RefCell::new(HashMap::new());
}

impl Mono {
    fn unit(n: usize) -> Self {
        Self {
            a: vec![0; n + 1],
            b: vec![0; n + 1],
        }
    }

    fn from_word(n: usize, w: &Word) -> Self {
        let mut m = Self::unit(n);
        for g in w.letters() {
            if g.starred {
                m.b[g.index] += 1;
            } else {
                m.a[g.index] += 1;
            }
        }
        m
    }

    fn to_word(&self) -> Word {
        let mut v = Vec::new();
        for (i, &e) in self.a.iter().enumerate() {
            v.extend(std::iter::repeat_n(Generator::z(i), e as usize));
        }
        for (i, &e) in self.b.iter().enumerate().rev() {
            v.extend(std::iter::repeat_n(Generator::zs(i), e as usize));
        }
        Word(v)
    }
}

/// Accumulates terms, dropping cancelled ones at the end.
#[derive(Default)]
struct Acc(HashMap<Mono, LaurentPoly>);

impl Acc {
    fn add(&mut self, m: Mono, c: LaurentPoly) {
        match self.0.get_mut(&m) {
            Some(slot) => *slot += &c,
            None => {
                self.0.insert(m, c);
            }
        }
    }

    fn add_sum(&mut self, s: &[(Mono, LaurentPoly)], c: &LaurentPoly) {
        for (m, k) in s {
            self.add(m.clone(), k * c);
        }
    }

    fn finish(self) -> Sum {
        Rc::new(self.0.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

/// `Σ_{i<k} x_i y_k`: the number of q-swaps when a block with exponents `x`
/// passes leftward through one with exponents `y`, ordered by index.
fn crossings(x: &[u32], y: &[u32]) -> i64 {
    let mut tail = 0i64;
    let mut total = 0i64;
    for i in (0..x.len()).rev() {
        total += x[i] as i64 * tail;
        tail += y[i] as i64;
    }
    total
}

fn single(m: Mono) -> Sum {
    Rc::new(vec![(m, LaurentPoly::one())])
}

/// Removes `z_n z_n*` at the junction via `z_n z_n* = 1 - Σ_{i<n} z_i z_i*`.
fn junction(m: Mono) -> Sum {
    let n = m.a.len() - 1;
    if m.a[n] == 0 || m.b[n] == 0 {
        return single(m);
    }
    if let Some(hit) = JUNCTION.with(|c| c.borrow().get(&m).cloned()) {
        return hit;
    }
    let mut base = m.clone();
    base.a[n] -= 1;
    base.b[n] -= 1;
    let mut acc = Acc::default();
    acc.add_sum(&junction(base.clone()), &LaurentPoly::one());
    for i in 0..n {
        // z_i moves left past higher unstarred letters, z_i* right past
        // higher starred ones
        let swaps: u32 = base.a[i + 1..].iter().chain(&base.b[i + 1..]).sum();
        let mut t = base.clone();
        t.a[i] += 1;
        t.b[i] += 1;
        acc.add_sum(&junction(t), &LaurentPoly::integer(-1).shift(swaps as i64));
    }
    let out = acc.finish();
    JUNCTION.with(|c| c.borrow_mut().insert(m, out.clone()));
    out
}

/// `z^a z*^b · z_j*`.
fn push_star(m: &Mono, j: usize) -> Sum {
    let swaps: u32 = m.b[..j].iter().sum();
    let mut t = m.clone();
    t.b[j] += 1;
    let s = junction(t);
    if swaps == 0 {
        return s;
    }
    Rc::new(s.iter().map(|(m, c)| (m.clone(), c.shift(swaps as i64))).collect())
}

/// Normal form of `z*^b z_j`.
fn star_past(b: &[u32], j: usize) -> Sum {
    let n = b.len() - 1;
    let Some(m) = b.iter().position(|&e| e > 0) else {
        let mut t = Mono::unit(n);
        t.a[j] = 1;
        return single(t);
    };
    let key = (b.to_vec(), j);
    if let Some(hit) = STAR_PAST.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    // z*^b = z*^{b'} z_m*, with m the lowest starred index
    let mut rest = b.to_vec();
    rest[m] -= 1;
    let mut acc = Acc::default();
    if m != j {
        // z_m* z_j = q z_j z_m*
        for (t, k) in star_past(&rest, j).iter() {
            acc.add_sum(&push_star(t, m), &k.shift(1));
        }
    } else {
        // z_j* z_j = z_j z_j* + (1 - q^2) Σ_{l>j} z_l z_l*
        let c = one_minus_q2();
        for l in j..=n {
            let weight = if l == j { LaurentPoly::one() } else { c.clone() };
            for (t, k) in star_past(&rest, l).iter() {
                acc.add_sum(&push_star(t, l), &(k * &weight));
            }
        }
    }
    let out = acc.finish();
    STAR_PAST.with(|c| c.borrow_mut().insert(key, out.clone()));
    out
}

/// Normal form of `z*^b z^a`.
fn block_past(b: &[u32], a: &[u32]) -> Sum {
    let n = b.len() - 1;
    let Some(j) = a.iter().position(|&e| e > 0) else {
        return single(Mono {
            a: vec![0; n + 1],
            b: b.to_vec(),
        });
    };
    let key = (b.to_vec(), a.to_vec());
    if let Some(hit) = BLOCK_PAST.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let mut rest = a.to_vec();
    rest[j] -= 1;
    let mut acc = Acc::default();
    for (t, k) in star_past(b, j).iter() {
        for (u, k2) in block_past(&t.b, &rest).iter() {
            let swaps = crossings(&u.a, &t.a);
            let merged = Mono {
                a: t.a.iter().zip(&u.a).map(|(x, y)| x + y).collect(),
                b: u.b.clone(),
            };
            acc.add_sum(&junction(merged), &(k * k2).shift(swaps));
        }
    }
    let out = acc.finish();
    BLOCK_PAST.with(|c| c.borrow_mut().insert(key, out.clone()));
    out
}

/// Normal form of the product of two normal words.
fn mono_mul(x: &Mono, y: &Mono, acc: &mut Acc, c: &LaurentPoly) {
    for (t, k) in block_past(&x.b, &y.a).iter() {
        let swaps = crossings(&t.a, &x.a) + crossings(&t.b, &y.b);
        let merged = Mono {
            a: x.a.iter().zip(&t.a).map(|(p, r)| p + r).collect(),
            b: t.b.iter().zip(&y.b).map(|(p, r)| p + r).collect(),
        };
        acc.add_sum(&junction(merged), &(k * c).shift(swaps));
    }
}

fn check_letters(n: usize, w: &[Generator]) -> Result<()> {
    match w.iter().find(|g| g.index > n) {
        Some(g) => Err(Error::IndexOutOfRange { index: g.index, n }),
        None => Ok(()),
    }
}

fn from_acc(n: usize, acc: Acc) -> NCElement {
    let mut out = NCElement::zero(n);
    for (m, c) in acc.0 {
        if !c.is_zero() {
            out.terms.insert(m.to_word(), c);
        }
    }
    out
}

pub(crate) fn normalize_word(n: usize, w: &Word) -> Result<NCElement> {
    check_letters(n, w.letters())?;
    let mut cur = vec![(Mono::unit(n), LaurentPoly::one())];
    for g in w.letters() {
        let mut letter = Mono::unit(n);
        if g.starred {
            letter.b[g.index] = 1;
        } else {
            letter.a[g.index] = 1;
        }
        let mut acc = Acc::default();
        for (m, c) in &cur {
            mono_mul(m, &letter, &mut acc, c);
        }
        cur = acc.0.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    let mut acc = Acc::default();
    for (m, c) in cur {
        acc.add(m, c);
    }
    Ok(from_acc(n, acc))
}

/// Product of two normal elements over the same `n`.
pub(crate) fn mul_normal(x: &NCElement, y: &NCElement) -> NCElement {
    let n = x.n;
    let ys: Vec<(Mono, &LaurentPoly)> = y.terms.iter().map(|(w, c)| (Mono::from_word(n, w), c)).collect();
    let mut acc = Acc::default();
    for (u, cu) in &x.terms {
        let mu = Mono::from_word(n, u);
        for (mv, cv) in &ys {
            mono_mul(&mu, mv, &mut acc, &(cu * *cv));
        }
    }
    from_acc(n, acc)
}

fn one_minus_q2() -> LaurentPoly {
    LaurentPoly::one() - LaurentPoly::q_pow(2)
}

/// One rewrite step on an adjacent pair, or `None` if the pair is irreducible.
pub fn rewrite_pair(n: usize, a: Generator, b: Generator) -> Option<Vec<(LaurentPoly, Word)>> {
    let q = LaurentPoly::q_pow(1);
    match (a.starred, b.starred) {
        (false, false) if a.index > b.index => Some(vec![(q, Word(vec![b, a]))]),
        (true, true) if a.index < b.index => Some(vec![(q, Word(vec![b, a]))]),
        (true, false) if a.index != b.index => Some(vec![(q, Word(vec![b, a]))]),
        (true, false) => {
            let i = a.index;
            let mut out = vec![(LaurentPoly::one(), Word(vec![b, a]))];
            if i < n {
                for l in (i + 1)..=n {
                    out.push((one_minus_q2(), Word(vec![Generator::z(l), Generator::zs(l)])));
                }
            }
            Some(out)
        }
        (false, true) if a.index == n && b.index == n => {
            let mut out = vec![(LaurentPoly::one(), Word::unit())];
            for i in 0..n {
                out.push((
                    LaurentPoly::integer(-1),
                    Word(vec![Generator::z(i), Generator::zs(i)]),
                ));
            }
            Some(out)
        }
        _ => None,
    }
}

/// Normalization by repeatedly rewriting the leftmost reducible pair.
///
/// Much slower than [`super::normalize`]; it follows a different reduction
/// order and serves as a cross-check of confluence.
pub fn normalize_leftmost(n: usize, w: &Word, max_steps: usize) -> Result<NCElement> {
    check_letters(n, w.letters())?;
    let mut pending: Vec<(LaurentPoly, Word)> = vec![(LaurentPoly::one(), w.clone())];
    let mut out = NCElement::zero(n);
    let mut steps = 0usize;
    while let Some((c, word)) = pending.pop() {
        let letters = word.letters();
        let hit = (0..letters.len().saturating_sub(1))
            .find_map(|p| rewrite_pair(n, letters[p], letters[p + 1]).map(|r| (p, r)));
        match hit {
            None => {
                let slot = out.terms.entry(word.clone()).or_default();
                *slot += &c;
                if slot.is_zero() {
                    out.terms.remove(&word);
                }
            }
            Some((p, replacement)) => {
                steps += 1;
                if steps > max_steps {
                    return Err(Error::StepBudgetExceeded(max_steps));
                }
                for (k, mid) in replacement {
                    let mut v = letters[..p].to_vec();
                    v.extend_from_slice(mid.letters());
                    v.extend_from_slice(&letters[p + 2..]);
                    pending.push((&c * &k, Word(v)));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalgebra::normalize;
    use crate::ncalgebra::RawElement;
    use proptest::prelude::*;

    fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..=n, any::<bool>()), 0..=max_len).prop_map(|v| {
            Word(
                v.into_iter()
                    .map(|(index, starred)| Generator { index, starred })
                    .collect(),
            )
        })
    }

    #[test]
    fn normal_words_are_fixed_points() {
        let n = 2;
        let w = Word(vec![
            Generator::z(0),
            Generator::z(0),
            Generator::z(2),
            Generator::zs(1),
            Generator::zs(0),
        ]);
        assert!(w.is_normal(n));
        let x = normalize(&RawElement::word(n, w.clone())).unwrap();
        assert_eq!(x.num_terms(), 1);
        assert!(x.coeff(&w).is_one());
    }

    #[test]
    fn results_are_normal() {
        let n = 2;
        let w = Word(vec![
            Generator::zs(2),
            Generator::z(0),
            Generator::zs(0),
            Generator::z(2),
            Generator::z(1),
            Generator::zs(1),
        ]);
        let x = normalize(&RawElement::word(n, w)).unwrap();
        for (v, _) in x.terms() {
            assert!(v.is_normal(n), "{v}");
        }
    }

    #[test]
    fn out_of_range_letters_are_rejected() {
        let w = Word(vec![Generator::z(3)]);
        assert_eq!(
            normalize_word(2, &w),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        );
    }

    #[test]
    fn irreducible_pairs_match_normal_words() {
        for n in 0..4 {
            for a in 0..=n {
                for b in 0..=n {
                    for (sa, sb) in [(false, false), (false, true), (true, false), (true, true)] {
                        let ga = Generator { index: a, starred: sa };
                        let gb = Generator { index: b, starred: sb };
                        let w = Word(vec![ga, gb]);
                        assert_eq!(rewrite_pair(n, ga, gb).is_none(), w.is_normal(n), "{w}");
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn incremental_and_leftmost_agree(
            (n, w) in (0usize..=3).prop_flat_map(|n| (Just(n), arb_word(n, 8)))
        ) {
            let a = normalize(&RawElement::word(n, w.clone())).unwrap();
            let b = normalize_leftmost(n, &w, 1_000_000).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    proptest! {
        #[test]
        fn normalization_is_multiplicative(u in arb_word(2, 5), v in arb_word(2, 5)) {
            let n = 2;
            let a = normalize(&RawElement::word(n, u.clone())).unwrap();
            let b = normalize(&RawElement::word(n, v.clone())).unwrap();
            let ab = normalize(&RawElement::word(n, u.concat(&v))).unwrap();
            prop_assert_eq!(a.checked_mul(&b).unwrap(), ab);
        }

        #[test]
        fn star_is_an_anti_automorphism(u in arb_word(2, 4), v in arb_word(2, 4)) {
            let n = 2;
            let a = normalize(&RawElement::word(n, u)).unwrap();
            let b = normalize(&RawElement::word(n, v)).unwrap();
            prop_assert_eq!(a.star().star(), a.clone());
            prop_assert_eq!((&a * &b).star(), &b.star() * &a.star());
        }

        #[test]
        fn multiplication_is_associative(u in arb_word(1, 4), v in arb_word(1, 4), w in arb_word(1, 4)) {
            let n = 1;
            let a = normalize(&RawElement::word(n, u)).unwrap();
            let b = normalize(&RawElement::word(n, v)).unwrap();
            let c = normalize(&RawElement::word(n, w)).unwrap();
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
