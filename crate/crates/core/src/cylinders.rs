//! Partial codings `f` and their basic open sets `N_f`, tagged with the
//! Cantor (γ), Ellentuck (ε) or doughnut (δ) collection they belong to.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index_algebra::{AtomSet, IndexSet, IndexSetDoc, PredicateResolver, Search, SetError, SetExpr};
use crate::pairing::PairIndex;
use crate::property_engine::{self, PropertyId};

/// Scan bound for the few checks that cannot be decided symbolically.
pub const DEFAULT_CHECK_BOUND: u64 = 100_000;

/// Members of `ones` sampled when `ones ⊆ domain` is not decidable.
const SUBSET_SAMPLE: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collection {
    Gamma,
    Epsilon,
    Delta,
}

impl Collection {
    pub const ALL: [Collection; 3] = [Collection::Gamma, Collection::Epsilon, Collection::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Collection::Gamma => "gamma",
            Collection::Epsilon => "epsilon",
            Collection::Delta => "delta",
        }
    }

    pub fn parse(s: &str) -> Option<Collection> {
        Collection::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Collection::Gamma => "γ",
            Collection::Epsilon => "ε",
            Collection::Delta => "δ",
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CylinderError {
    #[error("not a {collection} cylinder: {reason}")]
    NotInCollection { collection: Collection, reason: String },
    #[error("index {0} is in ones but not in the domain")]
    OnesOutsideDomain(PairIndex),
    #[error("relative cylinder: {0}")]
    Relative(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// `f(n) = 1` on `ones`, `0` on `domain \ ones`, undefined elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialCoding {
    pub domain: IndexSet,
    pub ones: IndexSet,
    pub description: String,
}

impl PartialCoding {
    pub fn new(domain: impl Into<IndexSet>, ones: impl Into<IndexSet>, description: impl Into<String>) -> Self {
        PartialCoding {
            domain: domain.into(),
            ones: ones.into(),
            description: description.into(),
        }
    }

    /// Domain `domain`, every value 0.
    pub fn zeros_on(domain: impl Into<IndexSet>, description: impl Into<String>) -> Self {
        PartialCoding::new(domain, AtomSet::empty(), description)
    }

    /// Domain `domain`, every value 1.
    pub fn ones_on(domain: impl Into<IndexSet> + Clone, description: impl Into<String>) -> Self {
        PartialCoding::new(domain.clone(), domain, description)
    }

    pub fn value(&self, k: PairIndex) -> Option<bool> {
        self.domain.contains(k).then(|| self.ones.contains(k))
    }

    /// Decides `k` as `v`.
    pub fn extended(&self, k: PairIndex, v: bool) -> PartialCoding {
        let mut g = self.clone();
        g.domain.insert(k);
        if v {
            g.ones.insert(k);
        } else {
            match &mut g.ones {
                IndexSet::Atoms(s) => s.remove(k),
                IndexSet::Predicate(p) => p.remove(k),
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    f: PartialCoding,
    collection: Collection,
    relative_to: Option<PropertyId>,
}

fn ones_within_domain(f: &PartialCoding) -> Result<(), CylinderError> {
    match f.ones.is_subset(&f.domain) {
        Some(true) => Ok(()),
        Some(false) | None => {
            let stray = SetExpr::Inter(vec![SetExpr::Set(&f.ones), SetExpr::not(SetExpr::Set(&f.domain))]);
            match stray.find_first(0) {
                Search::Found(k) => Err(CylinderError::OnesOutsideDomain(k)),
                Search::Empty => Ok(()),
                Search::Unknown { .. } => {
                    // undecidable symbolically: sample the smallest members
                    let sample = f.ones.first_n(SUBSET_SAMPLE);
                    match sample.indices().iter().find(|&&k| !f.domain.contains(k)) {
                        Some(&k) => Err(CylinderError::OnesOutsideDomain(k)),
                        None => Ok(()),
                    }
                }
            }
        }
    }
}

fn check_collection(f: &PartialCoding, collection: Collection) -> Result<(), String> {
    let domain_finite = f.domain.finite_members().is_some();
    match collection {
        Collection::Gamma => {
            if !domain_finite {
                return Err("the domain is not a finite explicit set".into());
            }
        }
        Collection::Epsilon | Collection::Delta => {
            if !f.domain.certified_infinite() {
                return Err("the domain is not certified infinite".into());
            }
            if !f.domain.certified_coinfinite() {
                return Err("the complement of the domain is not certified infinite".into());
            }
            if collection == Collection::Epsilon && f.ones.finite_members().is_none() {
                return Err("infinitely many 1s (ones must be a finite explicit set)".into());
            }
        }
    }
    Ok(())
}

impl Cylinder {
    pub fn validate(f: PartialCoding, collection: Collection) -> Result<Cylinder, CylinderError> {
        ones_within_domain(&f)?;
        check_collection(&f, collection).map_err(|reason| CylinderError::NotInCollection { collection, reason })?;
        Ok(Cylinder {
            f,
            collection,
            relative_to: None,
        })
    }

    /// `N_f ∩ C(p)` in the topology induced on `C(p)`; the intersection
    /// must be non-empty.
    pub fn validate_relative(f: PartialCoding, collection: Collection, p: PropertyId) -> Result<Cylinder, CylinderError> {
        let mut c = Cylinder::validate(f, collection)?;
        c.relative_to = Some(p);
        match property_engine::relative_nonempty(&c) {
            Ok(true) => Ok(c),
            Ok(false) => Err(CylinderError::Relative(format!(
                "N_f has no member with property {}",
                p.name()
            ))),
            Err(e) => Err(CylinderError::Relative(e.to_string())),
        }
    }

    pub fn coding(&self) -> &PartialCoding {
        &self.f
    }

    pub fn domain(&self) -> &IndexSet {
        &self.f.domain
    }

    pub fn ones(&self) -> &IndexSet {
        &self.f.ones
    }

    pub fn description(&self) -> &str {
        &self.f.description
    }

    pub fn collection(&self) -> Collection {
        self.collection
    }

    pub fn relative_to(&self) -> Option<PropertyId> {
        self.relative_to
    }

    pub fn value(&self, k: PairIndex) -> Option<bool> {
        self.f.value(k)
    }

    /// The same coding re-tagged; fails if it does not meet `collection`.
    pub fn retag(&self, collection: Collection) -> Result<Cylinder, CylinderError> {
        let mut c = Cylinder::validate(self.f.clone(), collection)?;
        c.relative_to = self.relative_to;
        Ok(c)
    }

    /// `self` with `k` decided as `v`, validated in the same collection.
    pub fn extend(&self, decisions: &[(PairIndex, bool)], description: impl Into<String>) -> Result<Cylinder, CylinderError> {
        let mut f = self.f.clone();
        for &(k, v) in decisions {
            f = f.extended(k, v);
        }
        f.description = description.into();
        match self.relative_to {
            Some(p) => Cylinder::validate_relative(f, self.collection, p),
            None => Cylinder::validate(f, self.collection),
        }
    }

    /// First index where `self` fails to refine `base`, or `Ok` when
    /// `N_self ⊆ N_base`.
    pub fn refinement_defect(&self, base: &Cylinder) -> Result<(), Option<PairIndex>> {
        if self.relative_to != base.relative_to {
            return Err(None);
        }
        let checks = [
            // dom(f) ⊆ dom(g)
            SetExpr::Inter(vec![SetExpr::Set(base.domain()), SetExpr::not(SetExpr::Set(self.domain()))]),
            // f = 1 ⇒ g = 1
            SetExpr::Inter(vec![SetExpr::Set(base.ones()), SetExpr::not(SetExpr::Set(self.ones()))]),
            // on dom(f), g = 1 ⇒ f = 1
            SetExpr::Inter(vec![
                SetExpr::Set(base.domain()),
                SetExpr::Set(self.ones()),
                SetExpr::not(SetExpr::Set(base.ones())),
            ]),
        ];
        for e in &checks {
            match e.find_first(DEFAULT_CHECK_BOUND) {
                Search::Empty => {}
                Search::Found(k) => return Err(Some(k)),
                Search::Unknown { .. } => return Err(None),
            }
        }
        Ok(())
    }

    /// `N_self ⊆ N_base`.
    pub fn refines(&self, base: &Cylinder) -> bool {
        self.refinement_defect(base).is_ok()
    }

    /// Indices decided in `self` but not in `base`, when that set is finite.
    pub fn new_decisions(&self, base: &Cylinder) -> Option<Vec<PairIndex>> {
        let e = SetExpr::Inter(vec![SetExpr::Set(self.domain()), SetExpr::not(SetExpr::Set(base.domain()))]);
        match (self.domain(), base.domain()) {
            (IndexSet::Atoms(a), IndexSet::Atoms(b)) => {
                let d = a.difference(b);
                d.finite_members().map(|s| s.iter().copied().collect())
            }
            (IndexSet::Predicate(a), IndexSet::Predicate(b)) if a.id() == b.id() => {
                let mut v: Vec<PairIndex> = a.plus().iter().chain(b.minus()).copied().filter(|&k| e.contains(k)).collect();
                v.sort();
                v.dedup();
                Some(v)
            }
            _ => None,
        }
    }

    /// A word of length `prefix_len` in `N_f`: decided positions copied,
    /// free positions drawn from ChaCha8 seeded with `seed`.
    pub fn sample_extension(&self, prefix_len: u64, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (1..=prefix_len)
            .map(|k| {
                let k = PairIndex::new(k).expect("1-based");
                match self.value(k) {
                    Some(v) => v,
                    None => rng.gen::<bool>(),
                }
            })
            .collect()
    }

    /// Decided values on `1..=prefix_len`, `None` where free.
    pub fn decided_prefix(&self, prefix_len: u64) -> Vec<Option<bool>> {
        (1..=prefix_len)
            .map(|k| self.value(PairIndex::new(k).expect("1-based")))
            .collect()
    }

    pub fn to_doc(&self) -> CylinderDoc {
        let ones = match self.f.ones.finite_members() {
            Some(s) => OnesDoc::List(s.iter().copied().collect()),
            None => OnesDoc::Set(self.f.ones.to_doc()),
        };
        CylinderDoc {
            collection: self.collection,
            domain: self.f.domain.to_doc(),
            ones,
            relative_to: self.relative_to,
            description: self.f.description.clone(),
        }
    }

    pub fn from_doc(doc: &CylinderDoc, resolver: &dyn PredicateResolver) -> Result<Cylinder, CylinderError> {
        let domain = IndexSet::from_doc(&doc.domain, resolver)?;
        let ones = match &doc.ones {
            OnesDoc::List(v) => IndexSet::Atoms(AtomSet::finite(v.iter().copied())),
            OnesDoc::Set(s) => IndexSet::from_doc(s, resolver)?,
        };
        let f = PartialCoding::new(domain, ones, doc.description.clone());
        match doc.relative_to {
            Some(p) => Cylinder::validate_relative(f, doc.collection, p),
            None => Cylinder::validate(f, doc.collection),
        }
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-cylinder dom={} ones={}", self.collection.symbol(), self.f.domain, self.f.ones)?;
        if let Some(p) = self.relative_to {
            write!(f, " relative to {}", p.name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OnesDoc {
    List(Vec<PairIndex>),
    Set(IndexSetDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderDoc {
    pub collection: Collection,
    pub domain: IndexSetDoc,
    pub ones: OnesDoc,
    pub relative_to: Option<PropertyId>,
    pub description: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_algebra::NoPredicates;
    use crate::pairing::{atom_of, Atom};
    use proptest::prelude::*;

    fn idx(k: u64) -> PairIndex {
        PairIndex::new(k).unwrap()
    }

    fn ab() -> AtomSet {
        AtomSet::of(&[Atom::A, Atom::B])
    }

    #[test]
    fn validate_examples() {
        let f = PartialCoding::zeros_on(ab(), "off-diagonal zeros");
        assert!(Cylinder::validate(f, Collection::Epsilon).is_ok());

        let ar = AtomSet::of(&[Atom::A, Atom::R]);
        let f = PartialCoding::ones_on(ar, "A and R ones");
        assert!(matches!(
            Cylinder::validate(f.clone(), Collection::Epsilon),
            Err(CylinderError::NotInCollection { collection: Collection::Epsilon, .. })
        ));
        assert!(Cylinder::validate(f, Collection::Delta).is_ok());

        let f = PartialCoding::new(AtomSet::finite([idx(1), idx(2)]), AtomSet::finite([idx(1)]), "");
        assert!(Cylinder::validate(f.clone(), Collection::Gamma).is_ok());
        assert!(Cylinder::validate(f, Collection::Epsilon).is_err());
    }

    #[test]
    fn ones_must_lie_in_domain() {
        let f = PartialCoding::new(AtomSet::finite([idx(1)]), AtomSet::finite([idx(4)]), "");
        assert_eq!(
            Cylinder::validate(f, Collection::Gamma),
            Err(CylinderError::OnesOutsideDomain(idx(4)))
        );
    }

    #[test]
    fn refines_examples() {
        let f = Cylinder::validate(PartialCoding::zeros_on(ab(), ""), Collection::Epsilon).unwrap();
        assert!(f.refines(&f));
        let g = f.extend(&[(idx(1), false)], "").unwrap();
        assert!(g.refines(&f));
        assert!(!f.refines(&g));
        let h = f.extend(&[(idx(2), true)], "").unwrap();
        assert_eq!(h.refinement_defect(&f), Err(Some(idx(2))));
        assert_eq!(g.new_decisions(&f), Some(vec![idx(1)]));
    }

    #[test]
    fn sample_extension_examples() {
        let f = Cylinder::validate(PartialCoding::zeros_on(ab(), ""), Collection::Epsilon).unwrap();
        let w = f.sample_extension(13, 99);
        for k in 1..=13u64 {
            if atom_of(idx(k)) != Atom::R {
                assert!(!w[k as usize - 1], "position {k}");
            }
        }
        assert_eq!(w, f.sample_extension(13, 99));
        let full = Cylinder::validate(
            PartialCoding::new(AtomSet::finite((1..=6).map(idx)), AtomSet::finite([idx(2), idx(5)]), ""),
            Collection::Gamma,
        )
        .unwrap();
        assert_eq!(full.sample_extension(6, 3), vec![false, true, false, false, true, false]);
    }

    #[test]
    fn nesting() {
        let g = Cylinder::validate(PartialCoding::new(AtomSet::finite([idx(3)]), AtomSet::empty(), ""), Collection::Gamma).unwrap();
        // finite domains are never ε or δ: the nesting holds for the sets N_f,
        // not for the literal domain conditions
        assert!(g.retag(Collection::Epsilon).is_err());
        let e = Cylinder::validate(PartialCoding::zeros_on(AtomSet::of(&[Atom::R]), ""), Collection::Epsilon).unwrap();
        assert!(e.retag(Collection::Delta).is_ok());
    }

    #[test]
    fn doc_round_trip_is_bit_exact() {
        let c = Cylinder::validate(
            PartialCoding::new(
                AtomSet::from_parts(&[Atom::B, Atom::R], [idx(2)], [idx(5)]),
                AtomSet::finite([idx(2), idx(13)]),
                "x",
            ),
            Collection::Epsilon,
        )
        .unwrap();
        let s = serde_json::to_string(&c.to_doc()).unwrap();
        let doc: CylinderDoc = serde_json::from_str(&s).unwrap();
        let back = Cylinder::from_doc(&doc, &NoPredicates).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back.to_doc()).unwrap(), s);
    }

    proptest! {
        #[test]
        fn extensions_agree_with_the_coding(mask in 1u8..7, minus in proptest::collection::vec(1u64..80, 0..4),
                                            ones in proptest::collection::vec(1u64..80, 0..4), seed in any::<u64>()) {
            let atoms: Vec<Atom> = Atom::ALL.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a).collect();
            let dom = AtomSet::from_parts(&atoms, [], minus.into_iter().map(idx));
            let ones = AtomSet::finite(ones.into_iter().map(idx).filter(|&k| dom.contains(k)));
            let c = Cylinder::validate(PartialCoding::new(dom, ones, ""), Collection::Epsilon).unwrap();
            let w = c.sample_extension(200, seed);
            for (pos, &bit) in w.iter().enumerate() {
                if let Some(v) = c.value(idx(pos as u64 + 1)) {
                    prop_assert_eq!(v, bit);
                }
            }
            prop_assert!(c.retag(Collection::Delta).is_ok());
        }
    }
}
