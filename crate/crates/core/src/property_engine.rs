//! Properties of relations compiled to constraints over pair indices, and
//! exact forced-subset / forced-disjoint reasoning on cylinders.
//!
//! Every property is a conjunction of three constraint shapes:
//!
//! * unary: every index of a scope set takes a fixed value;
//! * partner pair: each off-diagonal pair `(k, partner(k))` with `k ∈ A`
//!   satisfies `Equal`, `NotBothOne` or `AtLeastOne`;
//! * horn: `z(a) ∧ z(b) ⇒ z(c)` whenever `q_a = (x, y)`, `q_b = (y, z)`,
//!   `q_c = (x, z)`.
//!
//! A word satisfies every constraint iff it codes a relation with the
//! property; the unit tests check this against a definitional oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cylinders::Cylinder;
use crate::egalitarian::{induced_index_set, Direction, EgalitarianProperty, StreamSpace, StreamSpaceConfig};
use crate::index_algebra::{AtomSet, IndexSet, Search, SetExpr};
use crate::pairing::{decode, encode, max_coordinate_upto, partner, Atom, PairIndex};

pub const DEFAULT_VERDICT_BOUND: u64 = 10_000;

/// Largest coordinate used when scanning horn clauses over infinitely many 1s.
const HORN_SCAN_COORDINATE: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyId {
    Reflexive,
    Irreflexive,
    Complete,
    Transitive,
    Symmetric,
    Asymmetric,
    Antisymmetric,
    QuasiOrder,
    PartialOrder,
    Equivalence,
    LinearOrder,
    Anonymous,
    Paretian,
    StrongEquity,
}

use PropertyId::*;

impl PropertyId {
    pub const ALL: [PropertyId; 14] = [
        Reflexive,
        Irreflexive,
        Complete,
        Transitive,
        Symmetric,
        Asymmetric,
        Antisymmetric,
        QuasiOrder,
        PartialOrder,
        Equivalence,
        LinearOrder,
        Anonymous,
        Paretian,
        StrongEquity,
    ];

    /// Properties of relations on an arbitrary set.
    pub const BASIC: [PropertyId; 11] = [
        Reflexive,
        Irreflexive,
        Complete,
        Transitive,
        Symmetric,
        Asymmetric,
        Antisymmetric,
        QuasiOrder,
        PartialOrder,
        Equivalence,
        LinearOrder,
    ];

    pub const EGALITARIAN: [PropertyId; 3] = [Anonymous, Paretian, StrongEquity];

    pub fn name(self) -> &'static str {
        match self {
            Reflexive => "reflexive",
            Irreflexive => "irreflexive",
            Complete => "complete",
            Transitive => "transitive",
            Symmetric => "symmetric",
            Asymmetric => "asymmetric",
            Antisymmetric => "antisymmetric",
            QuasiOrder => "quasi_order",
            PartialOrder => "partial_order",
            Equivalence => "equivalence",
            LinearOrder => "linear_order",
            Anonymous => "anonymous",
            Paretian => "paretian",
            StrongEquity => "strong_equity",
        }
    }

    pub fn parse(s: &str) -> Option<PropertyId> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        PropertyId::ALL.into_iter().find(|p| p.name() == s)
    }

    /// The basic properties this one is the conjunction of.
    pub fn conjuncts(self) -> &'static [PropertyId] {
        match self {
            QuasiOrder => &[Transitive, Reflexive],
            PartialOrder => &[Transitive, Reflexive, Antisymmetric],
            Equivalence => &[Transitive, Reflexive, Symmetric],
            LinearOrder => &[Complete, Transitive, Antisymmetric],
            Reflexive => &[Reflexive],
            Irreflexive => &[Irreflexive],
            Complete => &[Complete],
            Transitive => &[Transitive],
            Symmetric => &[Symmetric],
            Asymmetric => &[Asymmetric],
            Antisymmetric => &[Antisymmetric],
            Anonymous => &[Anonymous],
            Paretian => &[Paretian],
            StrongEquity => &[StrongEquity],
        }
    }

    pub fn is_egalitarian(self) -> bool {
        self.egalitarian().is_some()
    }

    pub fn egalitarian(self) -> Option<EgalitarianProperty> {
        match self {
            Anonymous => Some(EgalitarianProperty::Anonymous),
            Paretian => Some(EgalitarianProperty::Paretian),
            StrongEquity => Some(EgalitarianProperty::StrongEquity),
            _ => None,
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("property {0} needs a stream-space configuration")]
    MissingStreamSpace(PropertyId),
    #[error("relative topologies are supported for transitive and quasi_order only, not {0}")]
    UnsupportedRelative(PropertyId),
    #[error("non-emptiness relative to {0} is decided only for finitely many 1s")]
    InfiniteOnes(PropertyId),
    #[error("non-emptiness relative to {0} could not be decided within the scan bound")]
    Undecided(PropertyId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRule {
    Equal,
    NotBothOne,
    AtLeastOne,
}

impl PairRule {
    pub fn holds(self, a: bool, b: bool) -> bool {
        match self {
            PairRule::Equal => a == b,
            PairRule::NotBothOne => !(a && b),
            PairRule::AtLeastOne => a || b,
        }
    }

    fn kind(self) -> ConstraintKind {
        match self {
            PairRule::Equal => ConstraintKind::Equal,
            PairRule::NotBothOne => ConstraintKind::NotBothOne,
            PairRule::AtLeastOne => ConstraintKind::AtLeastOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    ForcedOne,
    ForcedZero,
    Equal,
    NotBothOne,
    AtLeastOne,
    Horn,
}

/// A concrete constraint instance, named by the indices it mentions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub indices: Vec<PairIndex>,
}

impl Constraint {
    fn unary(value: bool, k: PairIndex) -> Constraint {
        Constraint {
            kind: if value { ConstraintKind::ForcedOne } else { ConstraintKind::ForcedZero },
            indices: vec![k],
        }
    }

    fn pair(rule: PairRule, k: PairIndex) -> Constraint {
        Constraint {
            kind: rule.kind(),
            indices: vec![k, partner(k)],
        }
    }

    fn horn(a: PairIndex, b: PairIndex, c: PairIndex) -> Constraint {
        Constraint {
            kind: ConstraintKind::Horn,
            indices: vec![a, b, c],
        }
    }

    /// Lexicographic order on the index list, then the kind.
    fn order_key(&self) -> (&[PairIndex], ConstraintKind) {
        (&self.indices, self.kind)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.indices.iter().map(|k| k.to_string()).collect();
        write!(f, "{:?}({})", self.kind, ks.join(", "))
    }
}

fn smaller(best: Option<Constraint>, cand: Constraint) -> Option<Constraint> {
    match best {
        Some(b) if b.order_key() <= cand.order_key() => Some(b),
        _ => Some(cand),
    }
}

#[derive(Debug, Clone)]
pub struct UnaryConstraint {
    pub scope: IndexSet,
    pub value: bool,
    pub from: PropertyId,
}

/// The machine form of a coding set: `z ∈ C(p)` iff `z` satisfies every
/// constraint.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub conjuncts: Vec<PropertyId>,
    pub unary: Vec<UnaryConstraint>,
    pub pair_rules: Vec<(PairRule, PropertyId)>,
    pub horn: Option<PropertyId>,
}

impl ConstraintSystem {
    /// The value a unary constraint forces at `k`, if any.
    pub fn unary_forced(&self, k: PairIndex) -> Option<bool> {
        self.unary.iter().find(|u| u.scope.contains(k)).map(|u| u.value)
    }

    /// Rules on the partner pair through `k`; empty on the diagonal.
    pub fn pair_rules_at(&self, k: PairIndex) -> Vec<PairRule> {
        if partner(k) == k {
            return Vec::new();
        }
        self.pair_rules.iter().map(|&(r, _)| r).collect()
    }

    /// Horn clauses `(a, b ⇒ c)` with all three indices `<= bound`, ordered
    /// by `(x, y, z)`. Clauses whose premise already contains the conclusion
    /// are omitted.
    pub fn horn_triples(&self, bound: u64) -> Vec<[PairIndex; 3]> {
        if self.horn.is_none() {
            return Vec::new();
        }
        horn_triples_upto(bound)
    }
}

fn horn_triples_upto(bound: u64) -> Vec<[PairIndex; 3]> {
    let Ok(b) = PairIndex::new(bound) else {
        return Vec::new();
    };
    let m = max_coordinate_upto(b);
    let mut out = Vec::new();
    for x in 1..=m {
        for y in 1..=m {
            if x == y {
                continue;
            }
            let a = encode(x, y).expect("small coordinates");
            if a.get() > bound {
                continue;
            }
            for z in 1..=m {
                if y == z {
                    continue;
                }
                let bb = encode(y, z).expect("small coordinates");
                let c = encode(x, z).expect("small coordinates");
                if bb.get() <= bound && c.get() <= bound {
                    out.push([a, bb, c]);
                }
            }
        }
    }
    out
}

fn compile_conjunct(p: PropertyId, space: Option<&Arc<StreamSpace>>, sys: &mut ConstraintSystem) -> Result<(), EngineError> {
    let r = || IndexSet::Atoms(AtomSet::of(&[Atom::R]));
    let mut unary = |scope: IndexSet, value: bool| {
        sys.unary.push(UnaryConstraint { scope, value, from: p });
    };
    match p {
        Reflexive => unary(r(), true),
        Irreflexive => unary(r(), false),
        Complete => {
            unary(r(), true);
            sys.pair_rules.push((PairRule::AtLeastOne, p));
        }
        Transitive => sys.horn = Some(p),
        Symmetric => sys.pair_rules.push((PairRule::Equal, p)),
        Asymmetric => {
            unary(r(), false);
            sys.pair_rules.push((PairRule::NotBothOne, p));
        }
        Antisymmetric => sys.pair_rules.push((PairRule::NotBothOne, p)),
        Anonymous | Paretian | StrongEquity => {
            let space = space.ok_or(EngineError::MissingStreamSpace(p))?;
            let e = p.egalitarian().expect("egalitarian property");
            unary(induced_index_set(space, e, Direction::Forced1).into(), true);
            if p != Anonymous {
                unary(induced_index_set(space, e, Direction::Forced0).into(), false);
            }
        }
        QuasiOrder | PartialOrder | Equivalence | LinearOrder => unreachable!("composites are expanded"),
    }
    Ok(())
}

/// Compiles the conjunction of `props` (composites are expanded, duplicates
/// dropped).
pub fn compile_all(props: &[PropertyId], space: Option<&Arc<StreamSpace>>) -> Result<ConstraintSystem, EngineError> {
    let mut conjuncts: Vec<PropertyId> = Vec::new();
    for p in props {
        for &c in p.conjuncts() {
            if !conjuncts.contains(&c) {
                conjuncts.push(c);
            }
        }
    }
    let mut sys = ConstraintSystem {
        conjuncts: conjuncts.clone(),
        unary: Vec::new(),
        pair_rules: Vec::new(),
        horn: None,
    };
    for c in conjuncts {
        compile_conjunct(c, space, &mut sys)?;
    }
    Ok(sys)
}

pub fn compile(p: PropertyId, space: Option<&Arc<StreamSpace>>) -> Result<ConstraintSystem, EngineError> {
    compile_all(&[p], space)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordVerdict {
    ViolatedAt(Constraint),
    ConsistentUpTo(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ForcedSubset,
    ForcedDisjoint,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: Outcome,
    pub witness_constraint: Option<Constraint>,
    pub bound: u64,
}

impl Verdict {
    pub fn is_forced_subset(&self) -> bool {
        self.verdict == Outcome::ForcedSubset
    }

    pub fn is_forced_disjoint(&self) -> bool {
        self.verdict == Outcome::ForcedDisjoint
    }
}

/// Why a cylinder is not shown to be forced inside a conjunct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub conjunct: PropertyId,
    pub kind: ConstraintKind,
    /// An index whose constraint some extension can break, when one is found.
    pub index: Option<PairIndex>,
    pub reason: String,
}

fn found_or(s: Search) -> Result<Option<PairIndex>, ()> {
    match s {
        Search::Found(k) => Ok(Some(k)),
        Search::Empty => Ok(None),
        Search::Unknown { .. } => Err(()),
    }
}

/// Evaluates properties on words and cylinders.
#[derive(Debug, Clone)]
pub struct Engine {
    space: Arc<StreamSpace>,
    bound: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(StreamSpaceConfig::default(), DEFAULT_VERDICT_BOUND)
    }
}

impl Engine {
    pub fn new(config: StreamSpaceConfig, bound: u64) -> Engine {
        Engine {
            space: StreamSpace::new(config),
            bound,
        }
    }

    pub fn space(&self) -> &Arc<StreamSpace> {
        &self.space
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn compile(&self, p: PropertyId) -> ConstraintSystem {
        compile(p, Some(&self.space)).expect("engine always carries a stream space")
    }

    fn compile_all(&self, props: &[PropertyId]) -> ConstraintSystem {
        compile_all(props, Some(&self.space)).expect("engine always carries a stream space")
    }

    pub fn verdict_on_word(&self, w: &[bool], p: PropertyId, bound: u64) -> WordVerdict {
        let partial: Vec<Option<bool>> = w.iter().map(|&b| Some(b)).collect();
        self.verdict_on_partial_word(&partial, p, bound)
    }

    /// Like [`Engine::verdict_on_word`], skipping constraints that mention an
    /// undecided (`None`) position.
    pub fn verdict_on_partial_word(&self, w: &[Option<bool>], p: PropertyId, bound: u64) -> WordVerdict {
        let sys = self.compile(p);
        word_violation(&sys, w, bound).map_or(WordVerdict::ConsistentUpTo(bound), WordVerdict::ViolatedAt)
    }

    pub fn cylinder_verdict(&self, c: &Cylinder, p: PropertyId) -> Verdict {
        self.cylinder_verdict_bounded(c, p, self.bound)
    }

    pub fn cylinder_verdict_bounded(&self, c: &Cylinder, p: PropertyId, bound: u64) -> Verdict {
        let mut disjoint_props = vec![p];
        disjoint_props.extend(c.relative_to());
        let sys = self.compile_all(&disjoint_props);
        if let Some(v) = cylinder_violation(&sys, c, bound) {
            return Verdict {
                verdict: Outcome::ForcedDisjoint,
                witness_constraint: Some(v),
                bound,
            };
        }
        if self.subset_obstruction_bounded(c, p, bound).is_none() {
            return Verdict {
                verdict: Outcome::ForcedSubset,
                witness_constraint: None,
                bound,
            };
        }
        Verdict {
            verdict: Outcome::Undetermined,
            witness_constraint: None,
            bound,
        }
    }

    /// The first conjunct of `p` (outside `c`'s relative property) that the
    /// decided values do not force.
    pub fn subset_obstruction(&self, c: &Cylinder, p: PropertyId) -> Option<Obstruction> {
        self.subset_obstruction_bounded(c, p, self.bound)
    }

    fn subset_obstruction_bounded(&self, c: &Cylinder, p: PropertyId, bound: u64) -> Option<Obstruction> {
        let given: &[PropertyId] = c.relative_to().map_or(&[], |q| q.conjuncts());
        let needed: Vec<PropertyId> = p.conjuncts().iter().copied().filter(|q| !given.contains(q)).collect();
        let sys = self.compile_all(&needed);
        forced_subset_obstruction(&sys, c, bound)
    }
}

/// First violated constraint of a (partial) word, lexicographically smallest.
fn word_violation(sys: &ConstraintSystem, w: &[Option<bool>], bound: u64) -> Option<Constraint> {
    let bound = bound.min(w.len() as u64);
    let at = |k: PairIndex| w[k.get() as usize - 1];
    let mut best: Option<Constraint> = None;
    'unary: for k in 1..=bound {
        let k = PairIndex::new(k).expect("1-based");
        if let Some(v) = at(k) {
            for u in &sys.unary {
                if v != u.value && u.scope.contains(k) {
                    best = smaller(best, Constraint::unary(u.value, k));
                    break 'unary;
                }
            }
        }
    }
    if !sys.pair_rules.is_empty() {
        'pairs: for k in 1..=bound {
            let k = PairIndex::new(k).expect("1-based");
            let kp = partner(k);
            if kp <= k || kp.get() > bound {
                continue;
            }
            if let (Some(a), Some(b)) = (at(k), at(kp)) {
                for &(rule, _) in &sys.pair_rules {
                    if !rule.holds(a, b) {
                        best = smaller(best, Constraint::pair(rule, k));
                        break 'pairs;
                    }
                }
            }
        }
    }
    if sys.horn.is_some() {
        for [a, b, c] in horn_triples_upto(bound) {
            if at(a) == Some(true) && at(b) == Some(true) && at(c) == Some(false) {
                best = smaller(best, Constraint::horn(a, b, c));
            }
        }
    }
    best
}

fn set(s: &IndexSet) -> SetExpr<'_> {
    SetExpr::Set(s)
}

fn atoms<'a>(a: &[Atom]) -> SetExpr<'a> {
    SetExpr::atoms(a)
}

fn offdiag<'a>() -> SetExpr<'a> {
    atoms(&[Atom::A, Atom::B])
}

/// Coordinates of the off-diagonal 1s, when there are finitely many.
fn finite_offdiag_ones(c: &Cylinder) -> Option<Vec<(u64, u64)>> {
    let ones = c.ones().finite_members().cloned().or_else(|| {
        // ones may be infinite on R only
        SetExpr::Inter(vec![offdiag(), set(c.ones())])
            .to_atoms()
            .and_then(|s| s.finite_members().cloned())
    })?;
    Some(ones.into_iter().map(decode).filter(|(x, y)| x != y).collect())
}

fn horn_violation(c: &Cylinder, bound: u64) -> Option<Constraint> {
    let decided_zero = |k: PairIndex| c.domain().contains(k) && !c.ones().contains(k);
    let mut best = None;
    if let Some(pairs) = finite_offdiag_ones(c) {
        let by_first: BTreeMap<u64, Vec<u64>> = pairs.iter().fold(BTreeMap::new(), |mut m, &(x, y)| {
            m.entry(x).or_default().push(y);
            m
        });
        for &(x, y) in &pairs {
            for &z in by_first.get(&y).into_iter().flatten() {
                let (Ok(a), Ok(b), Ok(cc)) = (encode(x, y), encode(y, z), encode(x, z)) else {
                    continue;
                };
                if decided_zero(cc) {
                    best = smaller(best, Constraint::horn(a, b, cc));
                }
            }
        }
        return best;
    }
    let m = PairIndex::new(bound).map_or(1, max_coordinate_upto).min(HORN_SCAN_COORDINATE);
    let one = |k: PairIndex| c.ones().contains(k) && c.domain().contains(k);
    for x in 1..=m {
        for y in (1..=m).filter(|&y| y != x) {
            let a = encode(x, y).expect("small");
            if !one(a) {
                continue;
            }
            for z in (1..=m).filter(|&z| z != y) {
                let (b, cc) = (encode(y, z).expect("small"), encode(x, z).expect("small"));
                if one(b) && decided_zero(cc) {
                    return Some(Constraint::horn(a, b, cc));
                }
            }
        }
    }
    None
}

/// The lexicographically smallest constraint broken by `c`'s decided values.
fn cylinder_violation(sys: &ConstraintSystem, c: &Cylinder, bound: u64) -> Option<Constraint> {
    let (dom, ones) = (c.domain(), c.ones());
    let mut best: Option<Constraint> = None;
    for u in &sys.unary {
        let e = if u.value {
            SetExpr::Inter(vec![set(&u.scope), set(dom), SetExpr::not(set(ones))])
        } else {
            SetExpr::Inter(vec![set(&u.scope), set(ones)])
        };
        if let Search::Found(k) = e.find_first(bound) {
            best = smaller(best, Constraint::unary(u.value, k));
        }
    }
    for &(rule, _) in &sys.pair_rules {
        let a = || atoms(&[Atom::A]);
        fn p(s: &IndexSet) -> SetExpr<'_> {
            SetExpr::partner(SetExpr::Set(s))
        }
        let e = match rule {
            PairRule::Equal => SetExpr::Union(vec![
                SetExpr::Inter(vec![a(), set(ones), p(dom), SetExpr::not(p(ones))]),
                SetExpr::Inter(vec![a(), set(dom), SetExpr::not(set(ones)), p(ones)]),
            ]),
            PairRule::NotBothOne => SetExpr::Inter(vec![a(), set(ones), p(ones)]),
            PairRule::AtLeastOne => SetExpr::Inter(vec![
                a(),
                set(dom),
                SetExpr::not(set(ones)),
                p(dom),
                SetExpr::not(p(ones)),
            ]),
        };
        if let Search::Found(k) = e.find_first(bound) {
            best = smaller(best, Constraint::pair(rule, k));
        }
    }
    if sys.horn.is_some() {
        if let Some(v) = horn_violation(c, bound) {
            best = smaller(best, v);
        }
    }
    best
}

fn obstruction(conjunct: PropertyId, kind: ConstraintKind, found: Result<Option<PairIndex>, ()>, what: &str) -> Option<Obstruction> {
    match found {
        Ok(None) => None,
        Ok(Some(k)) => Some(Obstruction {
            conjunct,
            kind,
            index: Some(k),
            reason: format!("{what}; first such index {k}"),
        }),
        Err(()) => Some(Obstruction {
            conjunct,
            kind,
            index: None,
            reason: format!("could not rule out that {what} within the scan bound"),
        }),
    }
}

/// `None` iff every extension of `c` satisfies `sys`, by the exact rules.
fn forced_subset_obstruction(sys: &ConstraintSystem, c: &Cylinder, bound: u64) -> Option<Obstruction> {
    let (dom, ones) = (c.domain(), c.ones());
    for u in &sys.unary {
        if u.value {
            let e = SetExpr::Inter(vec![set(&u.scope), SetExpr::not(set(ones))]);
            if let Some(o) = obstruction(u.from, ConstraintKind::ForcedOne, found_or(e.find_first(bound)), "an index that must be 1 is not decided 1") {
                return Some(o);
            }
        } else {
            let free = SetExpr::Inter(vec![set(&u.scope), SetExpr::not(set(dom))]);
            let one = SetExpr::Inter(vec![set(&u.scope), set(ones)]);
            for e in [free, one] {
                if let Some(o) = obstruction(u.from, ConstraintKind::ForcedZero, found_or(e.find_first(bound)), "an index that must be 0 is not decided 0") {
                    return Some(o);
                }
            }
        }
    }
    let zeros = || SetExpr::Inter(vec![set(dom), SetExpr::not(set(ones))]);
    for &(rule, from) in &sys.pair_rules {
        let a = || atoms(&[Atom::A]);
        let pz = || SetExpr::partner(zeros());
        let po = || SetExpr::partner(set(ones));
        // A-indices whose pair some extension can break
        let e = match rule {
            PairRule::Equal => SetExpr::Inter(vec![
                a(),
                SetExpr::not(SetExpr::Union(vec![
                    SetExpr::Inter(vec![set(ones), po()]),
                    SetExpr::Inter(vec![zeros(), pz()]),
                ])),
            ]),
            PairRule::NotBothOne => SetExpr::Inter(vec![a(), SetExpr::not(zeros()), SetExpr::not(pz())]),
            PairRule::AtLeastOne => SetExpr::Inter(vec![a(), SetExpr::not(set(ones)), SetExpr::not(po())]),
        };
        if let Some(o) = obstruction(from, rule.kind(), found_or(e.find_first(bound)), "a partner pair is not decided favourably") {
            return Some(o);
        }
    }
    if let Some(from) = sys.horn {
        if !horn_forced(c, bound) {
            return Some(Obstruction {
                conjunct: from,
                kind: ConstraintKind::Horn,
                index: None,
                reason: "no structural transitivity rule applies: not all off-diagonal indices are decided 0, \
                         the decided off-diagonal 1s are not a finite closed set with decided domain, \
                         and the coding is not a decided strict total order"
                    .into(),
            });
        }
    }
    None
}

fn empty(e: SetExpr<'_>, bound: u64) -> bool {
    e.find_first(bound) == Search::Empty
}

/// Whitelisted structural rules under which every extension is transitive.
fn horn_forced(c: &Cylinder, bound: u64) -> bool {
    let (dom, ones) = (c.domain(), c.ones());
    let undecided_offdiag = || SetExpr::Inter(vec![offdiag(), SetExpr::not(set(dom))]);
    // every off-diagonal pair decided 0: only diagonal pairs remain
    if empty(undecided_offdiag(), bound) && empty(SetExpr::Inter(vec![offdiag(), set(ones)]), bound) {
        return true;
    }
    // every pair decided 1: the full relation
    if empty(SetExpr::not(set(ones)), bound) {
        return true;
    }
    // A all 1 and B all 0 (or the reverse): a strict total order plus any diagonal
    for (up, down) in [(Atom::A, Atom::B), (Atom::B, Atom::A)] {
        let up_ok = empty(SetExpr::Inter(vec![atoms(&[up]), SetExpr::not(set(ones))]), bound);
        let down_ok = empty(SetExpr::Inter(vec![atoms(&[down]), SetExpr::not(set(dom))]), bound)
            && empty(SetExpr::Inter(vec![atoms(&[down]), set(ones)]), bound);
        if up_ok && down_ok {
            return true;
        }
    }
    // off-diagonal fully decided with finitely many 1s, closed under composition
    if empty(undecided_offdiag(), bound) {
        if let Some(pairs) = finite_offdiag_ones(c) {
            let set: BTreeSet<(u64, u64)> = pairs.iter().copied().collect();
            let closed = pairs.iter().all(|&(x, y)| {
                pairs.iter().filter(|&&(y2, _)| y2 == y).all(|&(_, z)| {
                    if x == z {
                        encode(x, x).map(|k| ones.contains(k)).unwrap_or(false)
                    } else {
                        set.contains(&(x, z))
                    }
                })
            });
            if closed {
                return true;
            }
        }
    }
    false
}

/// Whether `N_f ∩ C(q)` is non-empty for `c.relative_to() = Some(q)`.
/// Decided exactly for `q ∈ {transitive, quasi_order}` and finitely many 1s:
/// the smallest candidate is the transitive closure of the 1s (plus the
/// diagonal for quasi-orders), which must avoid every decided 0.
pub fn relative_nonempty(c: &Cylinder) -> Result<bool, EngineError> {
    let Some(q) = c.relative_to() else {
        return Ok(true);
    };
    let reflexive = match q {
        Transitive => false,
        QuasiOrder => true,
        other => return Err(EngineError::UnsupportedRelative(other)),
    };
    let ones = c.ones().finite_members().ok_or(EngineError::InfiniteOnes(q))?;
    let decided_zero = |k: PairIndex| c.domain().contains(k) && !c.ones().contains(k);
    if reflexive {
        let e = SetExpr::Inter(vec![atoms(&[Atom::R]), set(c.domain()), SetExpr::not(set(c.ones()))]);
        match e.find_first(DEFAULT_VERDICT_BOUND) {
            Search::Found(_) => return Ok(false),
            Search::Empty => {}
            Search::Unknown { .. } => return Err(EngineError::Undecided(q)),
        }
    }
    let closure = transitive_closure(ones.iter().map(|&k| decode(k)));
    Ok(closure
        .into_iter()
        .all(|(x, z)| encode(x, z).map(|k| !decided_zero(k)).unwrap_or(true)))
}

/// Transitive closure of a finite set of coordinate pairs.
#[allow(clippy::needless_range_loop)]
pub fn transitive_closure(pairs: impl IntoIterator<Item = (u64, u64)>) -> BTreeSet<(u64, u64)> {
    let pairs: BTreeSet<(u64, u64)> = pairs.into_iter().collect();
    let coords: Vec<u64> = pairs
        .iter()
        .flat_map(|&(x, y)| [x, y])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos = |v: u64| coords.binary_search(&v).expect("coordinate listed");
    let n = coords.len();
    let mut m = vec![vec![false; n]; n];
    for &(x, y) in &pairs {
        m[pos(x)][pos(y)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if m[i][j] {
                out.insert((coords[i], coords[j]));
            }
        }
    }
    out
}
