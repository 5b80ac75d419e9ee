//! Exhaustive counting of relations on small finite sets, closed forms for
//! the counts that have one, and the bridge from finite relations to
//! coding prefixes.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{decode, encode, PairIndex};
use crate::property_engine::PropertyId;
use PropertyId::*;

/// Largest `n` for full enumeration (2^25 relations).
pub const MAX_BRUTE_N: u32 = 5;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteError {
    #[error("n = {0} is outside 1..=5 for full enumeration")]
    TooLarge(u32),
    #[error("{0} has no closed form")]
    NotClosedForm(PropertyId),
    #[error("{0} is not a property of relations on an arbitrary set")]
    NotBasic(PropertyId),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// A relation on `{x_1..x_n}`; bit `i*n + j` holds `(x_{i+1}, x_{j+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    pub n: u32,
    pub bits: u32,
}

impl FiniteRelation {
    pub fn new(n: u32, bits: u32) -> FiniteRelation {
        assert!((1..=MAX_BRUTE_N).contains(&n), "n must be in 1..=5");
        assert!(n * n == 32 || bits >> (n * n) == 0, "bits beyond n²");
        FiniteRelation { n, bits }
    }

    pub fn from_pairs(n: u32, pairs: &[(u32, u32)]) -> FiniteRelation {
        let bits = pairs.iter().fold(0, |b, &(i, j)| b | 1 << ((i - 1) * n + (j - 1)));
        FiniteRelation::new(n, bits)
    }

    /// Whether `(x_i, x_j)` is related, 1-based.
    pub fn get(&self, i: u32, j: u32) -> bool {
        self.bits >> ((i - 1) * self.n + (j - 1)) & 1 == 1
    }

    pub fn transpose(&self) -> FiniteRelation {
        let n = self.n;
        let mut t = 0;
        for i in 0..n {
            for j in 0..n {
                t |= (self.bits >> (i * n + j) & 1) << (j * n + i);
            }
        }
        FiniteRelation { n, bits: t }
    }
}

struct Masks {
    n: u32,
    row: u32,
    diag: u32,
    full: u32,
}

impl Masks {
    fn new(n: u32) -> Masks {
        Masks {
            n,
            row: (1 << n) - 1,
            diag: (0..n).fold(0, |d, i| d | 1 << (i * n + i)),
            full: if n * n == 32 { u32::MAX } else { (1 << (n * n)) - 1 },
        }
    }

    /// Composition contained in the relation, one row at a time.
    fn transitive(&self, bits: u32) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            let row_i = bits >> (i * n) & self.row;
            let mut reach = 0;
            let mut js = row_i;
            while js != 0 {
                let j = js.trailing_zeros();
                reach |= bits >> (j * n) & self.row;
                js &= js - 1;
            }
            reach & !row_i == 0
        })
    }

    fn check(&self, r: &FiniteRelation, t: u32, p: PropertyId) -> bool {
        let b = r.bits;
        match p {
            Reflexive => b & self.diag == self.diag,
            Irreflexive => b & self.diag == 0,
            Complete => (b | t) == self.full,
            Transitive => self.transitive(b),
            Symmetric => b == t,
            Asymmetric => b & t == 0,
            Antisymmetric => b & t & !self.diag == 0,
            QuasiOrder => self.check(r, t, Reflexive) && self.transitive(b),
            PartialOrder => self.check(r, t, QuasiOrder) && self.check(r, t, Antisymmetric),
            Equivalence => self.check(r, t, QuasiOrder) && b == t,
            LinearOrder => self.check(r, t, Complete) && self.check(r, t, Antisymmetric) && self.transitive(b),
            Anonymous | Paretian | StrongEquity => unreachable!("rejected before enumeration"),
        }
    }
}

/// Bitmask check of `p` on `r`.
pub fn satisfies(r: &FiniteRelation, p: PropertyId) -> bool {
    assert!(!p.is_egalitarian());
    Masks::new(r.n).check(r, r.transpose().bits, p)
}

/// Quantifier-by-quantifier check of `p` on `r`, kept separate from the
/// bitmask path as a cross-check.
pub fn satisfies_definitional(r: &FiniteRelation, p: PropertyId) -> bool {
    let n = r.n;
    let pts = || 1..=n;
    let rel = |x, y| r.get(x, y);
    let refl = pts().all(|x| rel(x, x));
    let trans = pts().all(|x| pts().all(|y| pts().all(|z| !(rel(x, y) && rel(y, z)) || rel(x, z))));
    let symm = pts().all(|x| pts().all(|y| !rel(x, y) || rel(y, x)));
    let anti = pts().all(|x| pts().all(|y| x == y || !(rel(x, y) && rel(y, x))));
    let complete = pts().all(|x| pts().all(|y| rel(x, y) || rel(y, x)));
    match p {
        Reflexive => refl,
        Irreflexive => pts().all(|x| !rel(x, x)),
        Complete => complete,
        Transitive => trans,
        Symmetric => symm,
        Asymmetric => pts().all(|x| pts().all(|y| !(rel(x, y) && rel(y, x)))),
        Antisymmetric => anti,
        QuasiOrder => refl && trans,
        PartialOrder => refl && trans && anti,
        Equivalence => refl && trans && symm,
        LinearOrder => complete && trans && anti,
        Anonymous | Paretian | StrongEquity => panic!("{p} is not a property of finite relations"),
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, FiniteError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    b.build().map_err(|e| FiniteError::Pool(e.to_string()))
}

/// Counts for every property in `props` in one pass over the `2^{n²}`
/// relations. `threads = None` uses all available parallelism.
pub fn count_brute_many(n: u32, props: &[PropertyId], threads: Option<usize>) -> Result<Vec<u64>, FiniteError> {
    if !(1..=MAX_BRUTE_N).contains(&n) {
        return Err(FiniteError::TooLarge(n));
    }
    if let Some(&p) = props.iter().find(|p| p.is_egalitarian()) {
        return Err(FiniteError::NotBasic(p));
    }
    let total = 1u64 << (n * n);
    let masks = Masks::new(n);
    let chunks = total.div_ceil(CHUNK);
    let counts = pool(threads)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut local = vec![0u64; props.len()];
                for bits in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    let r = FiniteRelation { n, bits: bits as u32 };
                    let t = r.transpose().bits;
                    for (slot, &p) in local.iter_mut().zip(props) {
                        *slot += masks.check(&r, t, p) as u64;
                    }
                }
                local
            })
            .reduce(|| vec![0; props.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
    });
    Ok(counts)
}

pub fn count_brute(n: u32, p: PropertyId, threads: Option<usize>) -> Result<u64, FiniteError> {
    count_brute_many(n, &[p], threads).map(|v| v[0])
}

/// `2^{n²}`.
pub fn all_relations(n: u32) -> BigUint {
    BigUint::from(2u8).pow(n * n)
}

pub fn has_closed_form(p: PropertyId) -> bool {
    matches!(p, Reflexive | Irreflexive | Symmetric | Antisymmetric | Asymmetric)
}

pub fn closed_form(n: u32, p: PropertyId) -> Result<BigUint, FiniteError> {
    let two = BigUint::from(2u8);
    let three = BigUint::from(3u8);
    let off = n * n - n;
    Ok(match p {
        Reflexive | Irreflexive => two.pow(off),
        Symmetric => two.pow((n * n + n) / 2),
        Antisymmetric => two.pow(n) * three.pow(off / 2),
        Asymmetric => three.pow(off / 2),
        other => return Err(FiniteError::NotClosedForm(other)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub name: String,
    /// Lowest terms, `num/den`.
    pub exact: String,
    /// Rounded half-up to 6 places.
    pub decimal: String,
}

impl Ratio {
    fn new(name: &str, num: &BigUint, den: &BigUint) -> Ratio {
        let r = BigRational::new(num.clone().into(), den.clone().into());
        Ratio {
            name: name.into(),
            exact: format!("{}/{}", r.numer(), r.denom()),
            decimal: decimal6(&r),
        }
    }
}

/// Fixed six-place rendering of a non-negative rational.
pub fn decimal6(r: &BigRational) -> String {
    let scaled = r * BigRational::from_integer(1_000_000.into());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let q = if rem.abs() * 2u8 >= *scaled.denom() { q + 1u8 } else { q };
    let (int, frac) = q.div_rem(&1_000_000.into());
    format!("{}.{:06}", int, frac.to_u64().unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: u32,
    /// Decimal strings, so arbitrarily large counts survive JSON.
    pub counts: BTreeMap<PropertyId, String>,
    pub all: String,
    pub ratios: Vec<Ratio>,
}

impl CountReport {
    pub fn ratio(&self, name: &str) -> Option<&Ratio> {
        self.ratios.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioReport {
    pub reports: Vec<CountReport>,
    /// Over `n = 2..=n_max`.
    pub q_over_p_decreasing: bool,
    pub p_over_t_decreasing: bool,
}

fn strictly_decreasing(xs: &[BigRational]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Exact transitive, quasi-order and partial-order counts and their ratios
/// for `n = 1..=n_max`.
pub fn ratio_report(n_max: u32, threads: Option<usize>) -> Result<RatioReport, FiniteError> {
    if !(1..=MAX_BRUTE_N).contains(&n_max) {
        return Err(FiniteError::TooLarge(n_max));
    }
    let props = [Transitive, QuasiOrder, PartialOrder];
    let mut reports = Vec::new();
    let mut qp = Vec::new();
    let mut pt = Vec::new();
    for n in 1..=n_max {
        let c = count_brute_many(n, &props, threads)?;
        let (t, q, p) = (BigUint::from(c[0]), BigUint::from(c[1]), BigUint::from(c[2]));
        let two_n = BigUint::from(2u8).pow(n);
        if n >= 2 {
            qp.push(BigRational::new(q.clone().into(), p.clone().into()));
            pt.push(BigRational::new(p.clone().into(), t.clone().into()));
        }
        reports.push(CountReport {
            n,
            counts: props.iter().zip(&c).map(|(&p, c)| (p, c.to_string())).collect(),
            all: all_relations(n).to_string(),
            ratios: vec![
                Ratio::new("Q/P", &q, &p),
                Ratio::new("P/T", &p, &t),
                Ratio::new("Q/T", &q, &t),
                Ratio::new("T/(2^n*P)", &t, &(&two_n * &p)),
                Ratio::new("T/(2^n*Q)", &t, &(&two_n * &q)),
            ],
        });
    }
    Ok(RatioReport {
        reports,
        q_over_p_decreasing: strictly_decreasing(&qp),
        p_over_t_decreasing: strictly_decreasing(&pt),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    /// Positions `1..=encode(n, n)`; free positions hold 0.
    pub word: Vec<bool>,
    /// Positions coding a pair that mentions some `x_m` with `m > n`.
    pub free: Vec<PairIndex>,
}

impl Embedding {
    /// The word with free positions undecided.
    pub fn partial(&self) -> Vec<Option<bool>> {
        let mut w: Vec<Option<bool>> = self.word.iter().map(|&b| Some(b)).collect();
        for k in &self.free {
            w[k.get() as usize - 1] = None;
        }
        w
    }
}

pub fn embed_prefix(r: &FiniteRelation) -> Embedding {
    let n = r.n as u64;
    let len = encode(n, n).expect("small").get();
    let mut word = Vec::with_capacity(len as usize);
    let mut free = Vec::new();
    for k in 1..=len {
        let k = PairIndex::new(k).expect("1-based");
        let (i, j) = decode(k);
        if i <= n && j <= n {
            word.push(r.get(i as u32, j as u32));
        } else {
            word.push(false);
            free.push(k);
        }
    }
    Embedding { word, free }
}

/// Inverse of [`embed_prefix`] on the positions it decides.
pub fn relation_of_prefix(n: u32, w: &[bool]) -> FiniteRelation {
    let mut bits = 0;
    for i in 1..=n {
        for j in 1..=n {
            let k = encode(i as u64, j as u64).expect("small").get() as usize;
            if w.get(k - 1).copied().unwrap_or(false) {
                bits |= 1 << ((i - 1) * n + (j - 1));
            }
        }
    }
    FiniteRelation::new(n, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property_engine::{Engine, WordVerdict};

    #[test]
    fn brute_examples() {
        assert_eq!(count_brute(2, Antisymmetric, None).unwrap(), 12);
        assert_eq!(count_brute(2, Symmetric, None).unwrap(), 8);
        assert_eq!(count_brute(2, Transitive, None).unwrap(), 13);
        assert_eq!(count_brute(3, QuasiOrder, None).unwrap(), 29);
        assert_eq!(count_brute(3, PartialOrder, None).unwrap(), 19);
        assert_eq!(count_brute(6, Transitive, None), Err(FiniteError::TooLarge(6)));
        assert!(matches!(count_brute(2, Paretian, None), Err(FiniteError::NotBasic(_))));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form(3, Antisymmetric).unwrap(), BigUint::from(216u32));
        assert_eq!(closed_form(4, Reflexive).unwrap(), BigUint::from(4096u32));
        assert_eq!(all_relations(1), BigUint::from(2u32));
        assert_eq!(closed_form(3, Transitive), Err(FiniteError::NotClosedForm(Transitive)));
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for n in 1..=4 {
            for p in [Reflexive, Irreflexive, Symmetric, Antisymmetric, Asymmetric] {
                assert_eq!(BigUint::from(count_brute(n, p, None).unwrap()), closed_form(n, p).unwrap(), "{p} n={n}");
            }
        }
    }

    #[test]
    fn bitmask_agrees_with_definitions() {
        for n in 1..=3 {
            for bits in 0..1u32 << (n * n) {
                let r = FiniteRelation::new(n, bits);
                for p in PropertyId::BASIC {
                    assert_eq!(satisfies(&r, p), satisfies_definitional(&r, p), "{p} {bits:b}");
                }
            }
        }
    }

    #[test]
    fn inclusion_chains() {
        for n in 1..=4 {
            let c = count_brute_many(n, &[LinearOrder, PartialOrder, QuasiOrder, Transitive, Equivalence], None).unwrap();
            assert!(c[0] <= c[1] && c[1] <= c[2] && c[2] <= c[3] && c[4] <= c[2]);
        }
    }

    #[test]
    fn thread_counts_do_not_change_results() {
        let props = PropertyId::BASIC;
        let one = count_brute_many(4, &props, Some(1)).unwrap();
        for t in [2, 8] {
            assert_eq!(count_brute_many(4, &props, Some(t)).unwrap(), one);
        }
    }

    #[test]
    fn ratios() {
        let r = ratio_report(4, None).unwrap();
        assert_eq!(r.reports[0].ratio("Q/P").unwrap().exact, "1/1");
        assert_eq!(r.reports[2].ratio("Q/P").unwrap().exact, "29/19");
        assert_eq!(r.reports[2].ratio("Q/P").unwrap().decimal, "1.526316");
        assert_eq!(r.reports[3].ratio("P/T").unwrap().exact, "219/3994");
        assert!(r.p_over_t_decreasing);
        assert!(!r.q_over_p_decreasing);
    }

    #[test]
    fn decimals_round_half_up() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(decimal6(&r(1, 3)), "0.333333");
        assert_eq!(decimal6(&r(2, 3)), "0.666667");
        assert_eq!(decimal6(&r(1, 2_000_000)), "0.000001");
        assert_eq!(decimal6(&r(7, 1)), "7.000000");
    }

    #[test]
    fn embedding_examples() {
        let id = FiniteRelation::from_pairs(2, &[(1, 1), (2, 2)]);
        let e = embed_prefix(&id);
        assert_eq!(e.word, vec![true, false, false, false, true]);
        assert_eq!(e.free.iter().map(|k| k.get()).collect::<Vec<_>>(), vec![4]);
        assert!(embed_prefix(&FiniteRelation::new(3, 0)).word.iter().all(|&b| !b));
        assert_eq!(relation_of_prefix(2, &e.word), id);

        let r = FiniteRelation::from_pairs(2, &[(1, 2), (2, 1)]);
        let e = embed_prefix(&r);
        let engine = Engine::default();
        let len = e.word.len() as u64;
        match engine.verdict_on_partial_word(&e.partial(), Transitive, len) {
            WordVerdict::ViolatedAt(c) => assert_eq!(c.indices.iter().map(|k| k.get()).collect::<Vec<_>>(), vec![2, 3, 1]),
            v => panic!("{v:?}"),
        }
        assert!(!satisfies_definitional(&r, Transitive));
    }

    #[test]
    fn bridge_coherence() {
        let engine = Engine::default();
        for n in 1..=3 {
            for bits in 0..1u32 << (n * n) {
                let r = FiniteRelation::new(n, bits);
                let e = embed_prefix(&r);
                let len = e.word.len() as u64;
                for p in PropertyId::BASIC {
                    let v = engine.verdict_on_partial_word(&e.partial(), p, len);
                    assert_eq!(matches!(v, WordVerdict::ConsistentUpTo(_)), satisfies_definitional(&r, p), "{p} n={n} {bits:b}");
                }
            }
        }
    }
}
