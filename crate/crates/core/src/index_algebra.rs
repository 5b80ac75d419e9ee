//! Decidable subsets of the pair indices.
//!
//! Two representations:
//!
//! * [`AtomSet`]: unions of the classes `R`, `A`, `B` with finite
//!   corrections. Closed under union, intersection, complement and transpose,
//!   and infinitude is read off the atoms, so every question about these sets
//!   is answered exactly.
//! * [`PredicateSet`]: an arbitrary decidable predicate plus a
//!   [`SetCertificate`] carrying the analytic facts (infinite, co-infinite,
//!   inclusions, disjointness) that cannot be computed from the predicate.
//!
//! [`SetExpr`] combines both for emptiness queries: exact on the atom algebra,
//! on finite supports, and on certified relations; bounded scanning otherwise.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{self, atom_of, decode, encode, partner, Atom, PairIndex};

/// Scan bound used by predicate sets that are not certified infinite.
pub const DEFAULT_SCAN_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("certificate for `{0}` claims facts without an argument")]
    UncitedCertificate(String),
    #[error("unknown predicate id `{0}`")]
    UnknownPredicate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AtomMask(u8);

impl AtomMask {
    pub const EMPTY: AtomMask = AtomMask(0);
    pub const FULL: AtomMask = AtomMask(0b111);

    fn bit(a: Atom) -> u8 {
        match a {
            Atom::R => 1,
            Atom::A => 2,
            Atom::B => 4,
        }
    }

    pub fn of(atoms: &[Atom]) -> AtomMask {
        AtomMask(atoms.iter().fold(0, |m, &a| m | Self::bit(a)))
    }

    pub fn has(self, a: Atom) -> bool {
        self.0 & Self::bit(a) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: AtomMask) -> AtomMask {
        AtomMask(self.0 | o.0)
    }

    pub fn intersect(self, o: AtomMask) -> AtomMask {
        AtomMask(self.0 & o.0)
    }

    pub fn complement(self) -> AtomMask {
        AtomMask(!self.0 & 0b111)
    }

    pub fn transposed(self) -> AtomMask {
        AtomMask::of(&self.atoms().map(Atom::transposed).collect::<Vec<_>>())
    }

    pub fn atoms(self) -> impl Iterator<Item = Atom> {
        Atom::ALL.into_iter().filter(move |&a| self.has(a))
    }
}

/// `(∪atoms ∪ plus) \ minus`, kept in normal form:
/// `plus ∩ ∪atoms = ∅` and `minus ⊆ ∪atoms`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AtomSet {
    atoms: AtomMask,
    plus: BTreeSet<PairIndex>,
    minus: BTreeSet<PairIndex>,
}

impl AtomSet {
    pub fn empty() -> AtomSet {
        AtomSet::default()
    }

    pub fn all() -> AtomSet {
        AtomSet::of(&[Atom::R, Atom::A, Atom::B])
    }

    pub fn of(atoms: &[Atom]) -> AtomSet {
        AtomSet {
            atoms: AtomMask::of(atoms),
            ..AtomSet::default()
        }
    }

    pub fn finite<I: IntoIterator<Item = PairIndex>>(items: I) -> AtomSet {
        AtomSet {
            plus: items.into_iter().collect(),
            ..AtomSet::default()
        }
    }

    /// Builds a set in normal form from arbitrary parts.
    pub fn from_parts<P, M>(atoms: &[Atom], plus: P, minus: M) -> AtomSet
    where
        P: IntoIterator<Item = PairIndex>,
        M: IntoIterator<Item = PairIndex>,
    {
        let mask = AtomMask::of(atoms);
        let minus: BTreeSet<PairIndex> = minus.into_iter().collect();
        let mut out = AtomSet {
            atoms: mask,
            plus: BTreeSet::new(),
            minus: minus.iter().copied().filter(|&k| mask.has(atom_of(k))).collect(),
        };
        for k in plus {
            if !minus.contains(&k) {
                out.insert(k);
            }
        }
        out
    }

    pub fn atoms(&self) -> AtomMask {
        self.atoms
    }

    pub fn plus(&self) -> &BTreeSet<PairIndex> {
        &self.plus
    }

    pub fn minus(&self) -> &BTreeSet<PairIndex> {
        &self.minus
    }

    pub fn contains(&self, k: PairIndex) -> bool {
        if self.atoms.has(atom_of(k)) {
            !self.minus.contains(&k)
        } else {
            self.plus.contains(&k)
        }
    }

    pub fn insert(&mut self, k: PairIndex) {
        if self.atoms.has(atom_of(k)) {
            self.minus.remove(&k);
        } else {
            self.plus.insert(k);
        }
    }

    pub fn remove(&mut self, k: PairIndex) {
        if self.atoms.has(atom_of(k)) {
            self.minus.insert(k);
        } else {
            self.plus.remove(&k);
        }
    }

    pub fn with(mut self, k: PairIndex) -> AtomSet {
        self.insert(k);
        self
    }

    pub fn without(mut self, k: PairIndex) -> AtomSet {
        self.remove(k);
        self
    }

    pub fn is_infinite(&self) -> bool {
        !self.atoms.is_empty()
    }

    pub fn is_coinfinite(&self) -> bool {
        self.atoms != AtomMask::FULL
    }

    pub fn is_finite(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.plus.is_empty()
    }

    /// Members when the set is finite.
    pub fn finite_members(&self) -> Option<&BTreeSet<PairIndex>> {
        self.is_finite().then_some(&self.plus)
    }

    fn combine(&self, other: &AtomSet, atoms: AtomMask, keep: impl Fn(bool, bool) -> bool) -> AtomSet {
        let mut out = AtomSet {
            atoms,
            ..AtomSet::default()
        };
        let candidates = self
            .plus
            .iter()
            .chain(&self.minus)
            .chain(&other.plus)
            .chain(&other.minus);
        for &k in candidates {
            let member = keep(self.contains(k), other.contains(k));
            if atoms.has(atom_of(k)) {
                if !member {
                    out.minus.insert(k);
                }
            } else if member {
                out.plus.insert(k);
            }
        }
        out
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        self.combine(other, self.atoms.union(other.atoms), |a, b| a || b)
    }

    pub fn intersect(&self, other: &AtomSet) -> AtomSet {
        self.combine(other, self.atoms.intersect(other.atoms), |a, b| a && b)
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        self.intersect(&other.complement())
    }

    pub fn complement(&self) -> AtomSet {
        AtomSet {
            atoms: self.atoms.complement(),
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }

    /// `{partner(k) : k ∈ self}`.
    pub fn partner_image(&self) -> AtomSet {
        AtomSet {
            atoms: self.atoms.transposed(),
            plus: self.plus.iter().map(|&k| partner(k)).collect(),
            minus: self.minus.iter().map(|&k| partner(k)).collect(),
        }
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Smallest member `>= k`.
    pub fn next_member(&self, k: PairIndex) -> Option<PairIndex> {
        let from_plus = self.plus.range(k..).next().copied();
        let mut cur = k;
        let from_atoms = loop {
            match next_in_mask(self.atoms, cur) {
                None => break None,
                Some(c) if self.minus.contains(&c) => cur = c.succ(),
                Some(c) => break Some(c),
            }
        };
        match (from_plus, from_atoms) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn first(&self) -> Option<PairIndex> {
        self.next_member(PairIndex::FIRST)
    }

    pub fn iter(&self) -> impl Iterator<Item = PairIndex> + '_ {
        let mut cur = Some(PairIndex::FIRST);
        std::iter::from_fn(move || {
            let next = self.next_member(cur?)?;
            cur = Some(next.succ());
            Some(next)
        })
    }

    pub fn first_n(&self, n: usize) -> Vec<PairIndex> {
        self.iter().take(n).collect()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.atoms.atoms().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", atoms.join("∪"))?;
        if !self.plus.is_empty() {
            write!(f, " + {:?}", self.plus.iter().map(|k| k.get()).collect::<Vec<_>>())?;
        }
        if !self.minus.is_empty() {
            write!(f, " - {:?}", self.minus.iter().map(|k| k.get()).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

fn next_in_atom(atom: Atom, k: PairIndex) -> PairIndex {
    let (i, j) = decode(k);
    let d = i + j - 1;
    match atom {
        Atom::R => pairing::next_diagonal_at_or_after(k),
        Atom::A => {
            if i < j {
                k
            } else {
                // first pair (1, d+1) of the next anti-diagonal is always in A
                encode(1, d + 1).expect("next anti-diagonal fits")
            }
        }
        Atom::B => {
            if i > j {
                return k;
            }
            // on anti-diagonal d, B starts at i = (d+1)/2 + 1
            let start = d.div_ceil(2) + 1;
            if start <= d {
                encode(start, d + 1 - start).expect("same anti-diagonal")
            } else {
                let nd = d + 1;
                let s = nd.div_ceil(2) + 1;
                encode(s, nd + 1 - s).expect("next anti-diagonal fits")
            }
        }
    }
}

fn next_in_mask(mask: AtomMask, k: PairIndex) -> Option<PairIndex> {
    mask.atoms().map(|a| next_in_atom(a, k)).min()
}

/// Analytic facts about a predicate set that the code cannot compute.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SetCertificate {
    pub infinite: bool,
    pub coinfinite: bool,
    /// Ids of predicate sets that contain this one.
    pub subset_of: Vec<String>,
    /// Ids of predicate sets disjoint from this one.
    pub disjoint_from: Vec<String>,
    pub argument: String,
}

impl SetCertificate {
    fn claims_anything(&self) -> bool {
        self.infinite || self.coinfinite || !self.subset_of.is_empty() || !self.disjoint_from.is_empty()
    }
}

type Membership = Arc<dyn Fn(PairIndex) -> bool + Send + Sync>;

/// A decidable predicate with finite corrections `(base ∪ plus) \ minus`.
#[derive(Clone)]
pub struct PredicateSet {
    id: String,
    membership: Membership,
    certificate: SetCertificate,
    plus: BTreeSet<PairIndex>,
    minus: BTreeSet<PairIndex>,
    scan_bound: u64,
}

impl fmt::Debug for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateSet")
            .field("id", &self.id)
            .field("plus", &self.plus)
            .field("minus", &self.minus)
            .finish()
    }
}

impl PartialEq for PredicateSet {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.plus == other.plus && self.minus == other.minus
    }
}

impl PredicateSet {
    pub fn new<F>(id: impl Into<String>, membership: F, certificate: SetCertificate) -> Result<Self, SetError>
    where
        F: Fn(PairIndex) -> bool + Send + Sync + 'static,
    {
        let id = id.into();
        if certificate.claims_anything() && certificate.argument.trim().is_empty() {
            return Err(SetError::UncitedCertificate(id));
        }
        Ok(PredicateSet {
            id,
            membership: Arc::new(membership),
            certificate,
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
            scan_bound: DEFAULT_SCAN_BOUND,
        })
    }

    pub fn with_scan_bound(mut self, bound: u64) -> Self {
        self.scan_bound = bound;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn certificate(&self) -> &SetCertificate {
        &self.certificate
    }

    pub fn plus(&self) -> &BTreeSet<PairIndex> {
        &self.plus
    }

    pub fn minus(&self) -> &BTreeSet<PairIndex> {
        &self.minus
    }

    pub fn scan_bound(&self) -> u64 {
        self.scan_bound
    }

    pub fn base_contains(&self, k: PairIndex) -> bool {
        (self.membership)(k)
    }

    pub fn contains(&self, k: PairIndex) -> bool {
        if self.base_contains(k) {
            !self.minus.contains(&k)
        } else {
            self.plus.contains(&k)
        }
    }

    pub fn insert(&mut self, k: PairIndex) {
        if self.base_contains(k) {
            self.minus.remove(&k);
        } else {
            self.plus.insert(k);
        }
    }

    pub fn remove(&mut self, k: PairIndex) {
        if self.base_contains(k) {
            self.minus.insert(k);
        } else {
            self.plus.remove(&k);
        }
    }

    /// Finite corrections preserve infinitude and co-infinitude.
    pub fn certified_infinite(&self) -> bool {
        self.certificate.infinite
    }

    pub fn certified_coinfinite(&self) -> bool {
        self.certificate.coinfinite
    }

    fn base_subset_claim(&self, other: &PredicateSet) -> bool {
        self.id == other.id || self.certificate.subset_of.iter().any(|s| s == &other.id)
    }

    fn base_disjoint_claim(&self, other: &PredicateSet) -> bool {
        self.certificate.disjoint_from.iter().any(|s| s == &other.id)
            || other.certificate.disjoint_from.iter().any(|s| s == &self.id)
    }

    pub fn first_n(&self, n: usize) -> Prefix {
        let mut found = Vec::with_capacity(n.min(1 << 16));
        let mut k = 1u64;
        while found.len() < n {
            if !self.certified_infinite() && k > self.scan_bound {
                return Prefix::Exhausted {
                    found,
                    scanned_to: self.scan_bound,
                };
            }
            let idx = PairIndex::raw(k);
            if self.contains(idx) {
                found.push(idx);
            }
            k += 1;
        }
        Prefix::Complete(found)
    }
}

/// Result of materializing the smallest members of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prefix {
    /// The `n` smallest members, or every member if the set has fewer.
    Complete(Vec<PairIndex>),
    /// Scanning stopped at the bound before `n` members were found.
    Exhausted { found: Vec<PairIndex>, scanned_to: u64 },
}

impl Prefix {
    pub fn indices(&self) -> &[PairIndex] {
        match self {
            Prefix::Complete(v) => v,
            Prefix::Exhausted { found, .. } => found,
        }
    }
}

/// Looks up predicate sets by id when reading serialized documents.
pub trait PredicateResolver {
    fn resolve(&self, id: &str) -> Option<PredicateSet>;
}

/// Resolver for documents that only use the atom algebra.
pub struct NoPredicates;

impl PredicateResolver for NoPredicates {
    fn resolve(&self, _id: &str) -> Option<PredicateSet> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexSet {
    Atoms(AtomSet),
    Predicate(PredicateSet),
}

impl From<AtomSet> for IndexSet {
    fn from(s: AtomSet) -> Self {
        IndexSet::Atoms(s)
    }
}

impl From<PredicateSet> for IndexSet {
    fn from(s: PredicateSet) -> Self {
        IndexSet::Predicate(s)
    }
}

impl IndexSet {
    pub fn contains(&self, k: PairIndex) -> bool {
        match self {
            IndexSet::Atoms(s) => s.contains(k),
            IndexSet::Predicate(p) => p.contains(k),
        }
    }

    pub fn insert(&mut self, k: PairIndex) {
        match self {
            IndexSet::Atoms(s) => s.insert(k),
            IndexSet::Predicate(p) => p.insert(k),
        }
    }

    pub fn with(mut self, k: PairIndex) -> IndexSet {
        self.insert(k);
        self
    }

    pub fn as_atoms(&self) -> Option<&AtomSet> {
        match self {
            IndexSet::Atoms(s) => Some(s),
            IndexSet::Predicate(_) => None,
        }
    }

    /// Members when the set is a finite atom set.
    pub fn finite_members(&self) -> Option<&BTreeSet<PairIndex>> {
        self.as_atoms().and_then(AtomSet::finite_members)
    }

    pub fn certified_infinite(&self) -> bool {
        match self {
            IndexSet::Atoms(s) => s.is_infinite(),
            IndexSet::Predicate(p) => p.certified_infinite(),
        }
    }

    pub fn certified_coinfinite(&self) -> bool {
        match self {
            IndexSet::Atoms(s) => s.is_coinfinite(),
            IndexSet::Predicate(p) => p.certified_coinfinite(),
        }
    }

    pub fn first_n(&self, n: usize) -> Prefix {
        match self {
            IndexSet::Atoms(s) => Prefix::Complete(s.first_n(n)),
            IndexSet::Predicate(p) => p.first_n(n),
        }
    }

    /// `Some(answer)` when `self ⊆ other` can be decided exactly.
    pub fn is_subset(&self, other: &IndexSet) -> Option<bool> {
        if let Some(items) = self.finite_members() {
            return Some(items.iter().all(|&k| other.contains(k)));
        }
        match (self, other) {
            (IndexSet::Atoms(a), IndexSet::Atoms(b)) => Some(a.is_subset(b)),
            (IndexSet::Predicate(p), IndexSet::Predicate(q)) => {
                if !p.base_subset_claim(q) {
                    return None;
                }
                let plus_ok = p.plus.iter().all(|&k| q.contains(k));
                let minus_ok = q.minus.iter().all(|&k| !p.contains(k));
                Some(plus_ok && minus_ok)
            }
            (IndexSet::Predicate(p), IndexSet::Atoms(b)) if b.is_finite() && p.certified_infinite() => {
                Some(false)
            }
            _ => None,
        }
    }

    /// `Some(answer)` when `self ∩ other = ∅` can be decided exactly.
    pub fn is_disjoint(&self, other: &IndexSet) -> Option<bool> {
        if let Some(items) = self.finite_members() {
            return Some(items.iter().all(|&k| !other.contains(k)));
        }
        if let Some(items) = other.finite_members() {
            return Some(items.iter().all(|&k| !self.contains(k)));
        }
        match (self, other) {
            (IndexSet::Atoms(a), IndexSet::Atoms(b)) => Some(a.intersect(b).is_empty()),
            (IndexSet::Predicate(p), IndexSet::Predicate(q)) => {
                if !p.base_disjoint_claim(q) {
                    return None;
                }
                let ok = p.plus.iter().all(|&k| !q.contains(k)) && q.plus.iter().all(|&k| !p.contains(k));
                Some(ok)
            }
            _ => None,
        }
    }

    pub fn to_doc(&self) -> IndexSetDoc {
        match self {
            IndexSet::Atoms(s) => IndexSetDoc::Atoms {
                atoms: s.atoms.atoms().collect(),
                plus: s.plus.iter().copied().collect(),
                minus: s.minus.iter().copied().collect(),
            },
            IndexSet::Predicate(p) => IndexSetDoc::Predicate {
                predicate_id: p.id.clone(),
                plus: p.plus.iter().copied().collect(),
                minus: p.minus.iter().copied().collect(),
            },
        }
    }

    pub fn from_doc(doc: &IndexSetDoc, resolver: &dyn PredicateResolver) -> Result<IndexSet, SetError> {
        match doc {
            IndexSetDoc::Atoms { atoms, plus, minus } => Ok(IndexSet::Atoms(AtomSet::from_parts(
                atoms,
                plus.iter().copied(),
                minus.iter().copied(),
            ))),
            IndexSetDoc::Predicate {
                predicate_id,
                plus,
                minus,
            } => {
                let mut p = resolver
                    .resolve(predicate_id)
                    .ok_or_else(|| SetError::UnknownPredicate(predicate_id.clone()))?;
                for &k in minus {
                    p.remove(k);
                }
                for &k in plus {
                    p.insert(k);
                }
                Ok(IndexSet::Predicate(p))
            }
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Atoms(s) => s.fmt(f),
            IndexSet::Predicate(p) => {
                write!(f, "<{}>", p.id)?;
                if !p.plus.is_empty() {
                    write!(f, " + {:?}", p.plus.iter().map(|k| k.get()).collect::<Vec<_>>())?;
                }
                if !p.minus.is_empty() {
                    write!(f, " - {:?}", p.minus.iter().map(|k| k.get()).collect::<Vec<_>>())?;
                }
                Ok(())
            }
        }
    }
}

/// Wire form of an [`IndexSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexSetDoc {
    Atoms {
        atoms: Vec<Atom>,
        plus: Vec<PairIndex>,
        minus: Vec<PairIndex>,
    },
    Predicate {
        predicate_id: String,
        plus: Vec<PairIndex>,
        minus: Vec<PairIndex>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    Found(PairIndex),
    Empty,
    /// No member among `1..=scanned_to`; emptiness not decided.
    Unknown { scanned_to: u64 },
}

/// Set expressions over [`IndexSet`] leaves, evaluated for emptiness.
#[derive(Debug, Clone)]
pub enum SetExpr<'a> {
    Set(&'a IndexSet),
    Atoms(AtomSet),
    Inter(Vec<SetExpr<'a>>),
    Union(Vec<SetExpr<'a>>),
    Not(Box<SetExpr<'a>>),
    Partner(Box<SetExpr<'a>>),
}

impl<'a> SetExpr<'a> {
    pub fn atoms(atoms: &[Atom]) -> SetExpr<'a> {
        SetExpr::Atoms(AtomSet::of(atoms))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: SetExpr<'a>) -> SetExpr<'a> {
        SetExpr::Not(Box::new(e))
    }

    pub fn partner(e: SetExpr<'a>) -> SetExpr<'a> {
        SetExpr::Partner(Box::new(e))
    }

    pub fn contains(&self, k: PairIndex) -> bool {
        match self {
            SetExpr::Set(s) => s.contains(k),
            SetExpr::Atoms(s) => s.contains(k),
            SetExpr::Inter(v) => v.iter().all(|e| e.contains(k)),
            SetExpr::Union(v) => v.iter().any(|e| e.contains(k)),
            SetExpr::Not(e) => !e.contains(k),
            SetExpr::Partner(e) => e.contains(partner(k)),
        }
    }

    /// Exact evaluation when every leaf is an atom set.
    pub fn to_atoms(&self) -> Option<AtomSet> {
        match self {
            SetExpr::Set(IndexSet::Atoms(s)) => Some(s.clone()),
            SetExpr::Set(IndexSet::Predicate(_)) => None,
            SetExpr::Atoms(s) => Some(s.clone()),
            SetExpr::Inter(v) => v
                .iter()
                .try_fold(AtomSet::all(), |acc, e| Some(acc.intersect(&e.to_atoms()?))),
            SetExpr::Union(v) => v
                .iter()
                .try_fold(AtomSet::empty(), |acc, e| Some(acc.union(&e.to_atoms()?))),
            SetExpr::Not(e) => Some(e.to_atoms()?.complement()),
            SetExpr::Partner(e) => Some(e.to_atoms()?.partner_image()),
        }
    }

    /// A finite superset of the members, when one is evident.
    fn finite_support(&self) -> Option<BTreeSet<PairIndex>> {
        match self {
            SetExpr::Set(s) => s.finite_members().cloned(),
            SetExpr::Atoms(s) => s.finite_members().cloned(),
            SetExpr::Inter(v) => v.iter().filter_map(|e| e.finite_support()).min_by_key(|s| s.len()),
            SetExpr::Union(v) => v.iter().try_fold(BTreeSet::new(), |mut acc, e| {
                acc.extend(e.finite_support()?);
                Some(acc)
            }),
            SetExpr::Not(_) => None,
            SetExpr::Partner(e) => Some(e.finite_support()?.into_iter().map(partner).collect()),
        }
    }

    fn leaf(&self) -> Option<IndexSet> {
        match self {
            SetExpr::Set(s) => Some((*s).clone()),
            SetExpr::Atoms(s) => Some(IndexSet::Atoms(s.clone())),
            _ => None,
        }
    }

    /// Emptiness that follows from certified inclusions or disjointness.
    fn structurally_empty(&self) -> bool {
        let SetExpr::Inter(v) = self else {
            return false;
        };
        if v.iter().any(|e| e.structurally_empty()) {
            return true;
        }
        let positives: Vec<IndexSet> = v.iter().filter_map(|e| e.leaf()).collect();
        let negatives: Vec<IndexSet> = v
            .iter()
            .filter_map(|e| match e {
                SetExpr::Not(inner) => inner.leaf(),
                _ => None,
            })
            .collect();
        for (i, x) in positives.iter().enumerate() {
            if negatives.iter().any(|y| x.is_subset(y) == Some(true)) {
                return true;
            }
            if positives[i + 1..].iter().any(|y| x.is_disjoint(y) == Some(true)) {
                return true;
            }
        }
        false
    }

    /// Smallest member, exact where the structure allows and scanned up to
    /// `bound` otherwise.
    pub fn find_first(&self, bound: u64) -> Search {
        if let Some(s) = self.to_atoms() {
            return s.first().map_or(Search::Empty, Search::Found);
        }
        if let Some(support) = self.finite_support() {
            return support
                .into_iter()
                .find(|&k| self.contains(k))
                .map_or(Search::Empty, Search::Found);
        }
        if self.structurally_empty() {
            return Search::Empty;
        }
        (1..=bound)
            .map(PairIndex::raw)
            .find(|&k| self.contains(k))
            .map_or(Search::Unknown { scanned_to: bound }, Search::Found)
    }
}
