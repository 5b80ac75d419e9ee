//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Oracles here are written independently of the library: pair encoding,
//! property definitions, relation enumeration and the stream orders are all
//! re-derived from their definitions. Run with
//! `cargo test --release --test acceptance`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use relation_rarity::cli_reports::{self, RunConfig, TableKind};
use relation_rarity::cylinders::{Collection, Cylinder};
use relation_rarity::egalitarian::Stream;
use relation_rarity::finite_lab;
use relation_rarity::property_engine::{Constraint, ConstraintKind, Engine, Outcome, PropertyId, WordVerdict};
use relation_rarity::theorem_lab::{self, CertificateKind, Topology};
use PropertyId::*;

// Pinned limits. Counts, ratios and verdicts are compared exactly.
const C1_RUNTIME: Duration = Duration::from_secs(5);
const C2_RUNTIME: Duration = Duration::from_secs(10);
const C2_STRETCH_RUNTIME: Duration = Duration::from_secs(60);
const C4_RUNTIME: Duration = Duration::from_secs(30);
const C4_SAMPLES: u64 = 1000;
const C4_PREFIX: u64 = 500;
const C5_RUNTIME: Duration = Duration::from_secs(60);
const C5_SAMPLES: u64 = 500;
const C5_MAX_EXTENSION: usize = 2;
const C8_RUNTIME: Duration = Duration::from_secs(5);
const TABLE_SAMPLES: u64 = 500;

// ---- independent oracles ----

/// Anti-diagonal position of `(i, j)`, 1-based.
fn pos(i: u64, j: u64) -> u64 {
    let s = i + j;
    (s - 2) * (s - 1) / 2 + i
}

/// Coordinates of position `k` by walking the anti-diagonals.
fn coords(k: u64) -> (u64, u64) {
    let mut s = 2;
    let mut start = 1;
    while start + (s - 1) <= k {
        start += s - 1;
        s += 1;
    }
    let i = k - start + 1;
    (i, s - i)
}

/// Relation on `{1..n}` as a dense matrix.
#[derive(Clone)]
struct Rel {
    n: usize,
    m: Vec<Vec<bool>>,
}

impl Rel {
    fn from_code(n: usize, code: u64) -> Rel {
        let mut m = vec![vec![false; n]; n];
        for (b, cell) in m.iter_mut().flatten().enumerate() {
            *cell = code >> b & 1 == 1;
        }
        Rel { n, m }
    }

    fn r(&self, x: usize, y: usize) -> bool {
        self.m[x][y]
    }

    fn holds(&self, p: PropertyId) -> bool {
        let n = self.n;
        let pairs = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));
        let refl = (0..n).all(|x| self.r(x, x));
        let irrefl = (0..n).all(|x| !self.r(x, x));
        let symm = pairs().all(|(x, y)| !self.r(x, y) || self.r(y, x));
        let asym = pairs().all(|(x, y)| !(self.r(x, y) && self.r(y, x)));
        let anti = pairs().all(|(x, y)| x == y || !(self.r(x, y) && self.r(y, x)));
        let comp = pairs().all(|(x, y)| self.r(x, y) || self.r(y, x));
        let trans = pairs().all(|(x, y)| !self.r(x, y) || (0..n).all(|z| !self.r(y, z) || self.r(x, z)));
        match p {
            Reflexive => refl,
            Irreflexive => irrefl,
            Complete => comp,
            Transitive => trans,
            Symmetric => symm,
            Asymmetric => asym,
            Antisymmetric => anti,
            QuasiOrder => refl && trans,
            PartialOrder => refl && trans && anti,
            Equivalence => refl && trans && symm,
            LinearOrder => comp && trans && anti,
            _ => unreachable!(),
        }
    }

    /// Word of length `pos(n, n)`, positions outside the square undecided.
    fn prefix(&self) -> Vec<Option<bool>> {
        let len = pos(self.n as u64, self.n as u64);
        (1..=len)
            .map(|k| {
                let (i, j) = coords(k);
                (i as usize <= self.n && j as usize <= self.n).then(|| self.r(i as usize - 1, j as usize - 1))
            })
            .collect()
    }
}

fn oracle_count(n: usize, p: PropertyId) -> u64 {
    (0..1u64 << (n * n)).filter(|&c| Rel::from_code(n, c).holds(p)).count() as u64
}

/// Largest `m` such that every pair in `{1..m}²` has position `<= len`;
/// the last position of the square is `pos(m, m)`.
fn square_within(len: u64) -> usize {
    (1..).take_while(|&m| pos(m, m) <= len).last().unwrap_or(0) as usize
}

fn rel_of_word(w: &[bool], m: usize) -> Rel {
    let mut r = Rel { n: m, m: vec![vec![false; m]; m] };
    for x in 0..m {
        for y in 0..m {
            r.m[x][y] = w[pos(x as u64 + 1, y as u64 + 1) as usize - 1];
        }
    }
    r
}

fn pareto_below(s: &Stream, t: &Stream) -> bool {
    s.0.iter().zip(&t.0).all(|(a, b)| a <= b) && s.0.iter().zip(&t.0).any(|(a, b)| a < b)
}

fn equity_below(s: &Stream, t: &Stream) -> bool {
    let n = s.0.len();
    let diff: Vec<usize> = (0..n).filter(|&k| s.0[k] != t.0[k]).collect();
    if diff.len() != 2 {
        return false;
    }
    let (i, j) = (diff[0], diff[1]);
    let ok = |i: usize, j: usize| s.0[i] < t.0[i] && t.0[i] < t.0[j] && t.0[j] < s.0[j];
    ok(i, j) || ok(j, i)
}

fn one_swap(s: &Stream, t: &Stream) -> bool {
    let n = s.0.len();
    if s == t {
        return true;
    }
    (0..n).any(|i| (i + 1..n).any(|j| {
        let mut u = s.0.clone();
        u.swap(i, j);
        u == t.0
    }))
}

/// Re-derives that `c`'s indices are violated by the decided values of `g`
/// and that the constraint really belongs to `p` (or its relative set).
fn constraint_is_genuine(engine: &Engine, g: &Cylinder, c: &Constraint, p: PropertyId) -> Result<(), String> {
    let v: Vec<Option<bool>> = c.indices.iter().map(|&k| g.value(k)).collect();
    let raw: Vec<u64> = c.indices.iter().map(|k| k.get()).collect();
    let violated = match (c.kind, v.as_slice()) {
        (ConstraintKind::ForcedOne, [Some(false)]) => true,
        (ConstraintKind::ForcedZero, [Some(true)]) => true,
        (ConstraintKind::Equal, [Some(a), Some(b)]) => a != b,
        (ConstraintKind::NotBothOne, [Some(true), Some(true)]) => true,
        (ConstraintKind::AtLeastOne, [Some(false), Some(false)]) => true,
        (ConstraintKind::Horn, [Some(true), Some(true), Some(false)]) => true,
        _ => false,
    };
    if !violated {
        return Err(format!("constraint {c} is not violated by decided values {v:?}"));
    }
    let cs: Vec<(u64, u64)> = raw.iter().map(|&k| coords(k)).collect();
    let transposes = |a: (u64, u64), b: (u64, u64)| a == (b.1, b.0) && a.0 != a.1;
    let meaningful = match c.kind {
        ConstraintKind::ForcedOne if p.is_egalitarian() => {
            let (s, t) = engine.space().pair_streams(c.indices[0]);
            match p {
                Anonymous => one_swap(&s, &t),
                Paretian => pareto_below(&t, &s),
                _ => equity_below(&t, &s),
            }
        }
        ConstraintKind::ForcedZero if p.is_egalitarian() => {
            let (s, t) = engine.space().pair_streams(c.indices[0]);
            match p {
                Paretian => pareto_below(&s, &t),
                StrongEquity => equity_below(&s, &t),
                _ => false,
            }
        }
        ConstraintKind::ForcedOne | ConstraintKind::ForcedZero => cs[0].0 == cs[0].1,
        ConstraintKind::Equal | ConstraintKind::NotBothOne | ConstraintKind::AtLeastOne => transposes(cs[0], cs[1]),
        ConstraintKind::Horn => cs[0].1 == cs[1].0 && cs[2] == (cs[0].0, cs[1].1),
    };
    if !meaningful {
        return Err(format!("constraint {c} at coordinates {cs:?} does not encode {p}"));
    }
    Ok(())
}

// ---- harness ----

struct Check {
    pass: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Check {
    Check { pass: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Check {
    Check { pass: false, detail: detail.into() }
}

fn timed(limit: Duration, started: Instant, o: Check) -> Check {
    let el = started.elapsed();
    if el > limit {
        fail(format!("{} (took {:.2?}, limit {:?})", o.detail, el, limit))
    } else {
        Check { detail: format!("{} [{:.2?}]", o.detail, el), ..o }
    }
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let mut checks = 0;
    for n in 1..=4usize {
        let sq = (n * n) as u32;
        let off = sq - n as u32;
        let expected = [
            (Reflexive, 2u128.pow(off)),
            (Irreflexive, 2u128.pow(off)),
            (Symmetric, 2u128.pow((sq + n as u32) / 2)),
            (Antisymmetric, 2u128.pow(n as u32) * 3u128.pow(off / 2)),
            (Asymmetric, 3u128.pow(off / 2)),
        ];
        if finite_lab::all_relations(n as u32).to_string() != 2u128.pow(sq).to_string() {
            return fail(format!("2^(n²) wrong at n={n}"));
        }
        for (p, want) in expected {
            let brute = finite_lab::count_brute(n as u32, p, None).unwrap() as u128;
            let cf = finite_lab::closed_form(n as u32, p).unwrap().to_string();
            let oracle = oracle_count(n, p) as u128;
            if brute != want || oracle != want || cf != want.to_string() {
                return fail(format!("{p} n={n}: brute {brute}, closed form {cf}, oracle {oracle}, formula {want}"));
            }
            checks += 1;
        }
    }
    timed(C1_RUNTIME, t, pass(format!("{checks} (n, property) counts equal their closed forms")))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let table: [(PropertyId, [u64; 4]); 4] = [
        (Transitive, [2, 13, 171, 3994]),
        (QuasiOrder, [1, 4, 29, 355]),
        (PartialOrder, [1, 3, 19, 219]),
        (Equivalence, [1, 2, 5, 15]),
    ];
    for (p, want) in table {
        for n in 1..=4 {
            let got = finite_lab::count_brute(n as u32, p, None).unwrap();
            let oracle = oracle_count(n, p);
            if got != want[n - 1] || oracle != want[n - 1] {
                return fail(format!("{p} n={n}: library {got}, oracle {oracle}, sequence {}", want[n - 1]));
            }
        }
    }
    let main = timed(C2_RUNTIME, t, pass("transitive, quasi-order, partial-order and equivalence counts for n=1..4 match"));
    if !main.pass {
        return main;
    }
    let s = Instant::now();
    let t5 = finite_lab::count_brute(5, Transitive, None).unwrap();
    let el = s.elapsed();
    let stretch = if t5 == 154_303 && el <= C2_STRETCH_RUNTIME { "met" } else { "missed" };
    Check {
        detail: format!("{}; stretch n=5 transitive = {t5} in {el:.2?} ({stretch})", main.detail),
        ..main
    }
}

fn criterion_3() -> Check {
    let r = finite_lab::ratio_report(4, None).unwrap();
    let get = |n: usize, name: &str| r.reports[n - 1].ratio(name).unwrap().exact.clone();
    let qp: Vec<String> = (2..=4).map(|n| get(n, "Q/P")).collect();
    let pt: Vec<String> = (2..=4).map(|n| get(n, "P/T")).collect();
    let frac = |s: &str| -> (u64, u64) {
        let (a, b) = s.split_once('/').unwrap();
        (a.parse().unwrap(), b.parse().unwrap())
    };
    // equal as rationals: a/b = c/d iff ad = bc
    let same = |got: &[String], want: [(u64, u64); 3]| {
        got.iter().zip(want).all(|(g, (c, d))| {
            let (a, b) = frac(g);
            a * d == b * c
        })
    };
    if !same(&qp, [(4, 3), (29, 19), (355, 219)]) || !same(&pt, [(3, 13), (19, 171), (219, 3994)]) {
        return fail(format!("ratio values differ: Q/P {qp:?}, P/T {pt:?}"));
    }
    if get(1, "Q/P") != "1/1" {
        return fail("Q/P at n=1 is not 1/1");
    }
    let decreasing = |v: &[String]| v.windows(2).all(|w| {
        let ((a, b), (c, d)) = (frac(&w[0]), frac(&w[1]));
        c * b < a * d
    });
    let (qd, pd) = (decreasing(&qp), decreasing(&pt));
    if qd != r.q_over_p_decreasing || pd != r.p_over_t_decreasing {
        return fail("library trend flags disagree with the exact comparison");
    }
    let detail = format!("Q/P = {} (strictly decreasing: {qd}); P/T = {} (strictly decreasing: {pd})", qp.join(", "), pt.join(", "));
    if qd && pd {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let engine = Engine::default();
    let m = square_within(C4_PREFIX);
    for p in [Transitive, Irreflexive, Asymmetric, Antisymmetric] {
        let w = match theorem_lab::witness_basic(&engine, p) {
            Ok(w) => w,
            Err(e) => return fail(format!("{p}: {e}")),
        };
        let c = &w.base;
        let valid = c.collection() == Collection::Epsilon
            && c.domain().certified_infinite()
            && c.domain().certified_coinfinite()
            && c.ones().finite_members().is_some_and(|o| o.is_empty());
        if !valid || Cylinder::validate(c.coding().clone(), Collection::Epsilon).is_err() {
            return fail(format!("{p}: witness is not a valid ε-cylinder with zero 1s"));
        }
        if w.verdict.verdict != Outcome::ForcedSubset {
            return fail(format!("{p}: verdict {:?}", w.verdict.verdict));
        }
        for s in 0..C4_SAMPLES {
            let word = c.sample_extension(C4_PREFIX, s);
            if engine.verdict_on_word(&word, p, C4_PREFIX) != WordVerdict::ConsistentUpTo(C4_PREFIX) {
                return fail(format!("{p}: sample {s} violates the property"));
            }
            if !rel_of_word(&word, m).holds(p) {
                return fail(format!("{p}: sample {s} fails the definitional oracle on the first {m} points"));
            }
        }
    }
    timed(
        C4_RUNTIME,
        t,
        pass(format!("4 witnesses forced inside; {C4_SAMPLES} extensions each consistent to {C4_PREFIX} and definitional on {m} points")),
    )
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let engine = Engine::default();
    let eps = Topology::plain(Collection::Epsilon);
    let pairs = [
        (Complete, eps),
        (Reflexive, eps),
        (Symmetric, eps),
        (QuasiOrder, Topology::relative(Collection::Epsilon, Transitive)),
        (PartialOrder, Topology::relative(Collection::Gamma, QuasiOrder)),
        (Anonymous, eps),
        (Paretian, eps),
        (StrongEquity, eps),
    ];
    let mut bad = Vec::new();
    let mut total = 0;
    for (p, top) in pairs {
        let mut failures = 0;
        let mut first = None;
        for i in 0..C5_SAMPLES {
            let c = theorem_lab::generate_cylinder(top, 0, i);
            total += 1;
            let res = theorem_lab::refute_small(&engine, &c, p).map_err(|e| e.to_string()).and_then(|cert| {
                let g = cert.subject();
                let added: BTreeSet<u64> = cert.extension.iter().map(|k| k.get()).collect();
                if !g.refines(&c) {
                    return Err("not a refinement".into());
                }
                if added.len() > C5_MAX_EXTENSION {
                    return Err(format!("extension {added:?} too long"));
                }
                if cert.verdict.verdict != Outcome::ForcedDisjoint {
                    return Err(format!("verdict {:?}", cert.verdict.verdict));
                }
                let con = cert.verdict.witness_constraint.as_ref().ok_or("no constraint")?;
                constraint_is_genuine(&engine, g, con, p)
            });
            if let Err(e) = res {
                failures += 1;
                first.get_or_insert((i, e));
            }
        }
        if failures > 0 {
            let (i, e) = first.unwrap();
            bad.push(format!("{p}×{top}: {failures}/{C5_SAMPLES} failed (first #{i}: {e})"));
        }
    }
    let o = if bad.is_empty() {
        pass(format!("{total} generated cylinders refuted with ≤ {C5_MAX_EXTENSION} new indices"))
    } else {
        fail(bad.join("; "))
    };
    timed(C5_RUNTIME, t, o)
}

fn criterion_6() -> Check {
    let engine = Engine::default();
    let w = match theorem_lab::witness_relative_partial_order(&engine) {
        Ok(w) => w,
        Err(e) => return fail(e.to_string()),
    };
    if w.verdict.verdict != Outcome::ForcedSubset || w.base.relative_to() != Some(QuasiOrder) {
        return fail(format!("relative verdict {:?}", w.verdict.verdict));
    }
    // antisymmetry must be forced on every Γ pair: one side decided 0
    for i in 1..=40u64 {
        for j in i + 1..=40 {
            let (a, b) = (pos(i, j), pos(j, i));
            let va = w.base.value(relation_rarity::pairing::PairIndex::new(a).unwrap());
            let vb = w.base.value(relation_rarity::pairing::PairIndex::new(b).unwrap());
            if va != Some(false) && vb != Some(false) {
                return fail(format!("partner pair ({a}, {b}) not decided against both-1"));
            }
        }
    }
    let mut quasi = 0;
    let mut consistent = 0;
    for n in 1..=3usize {
        for code in 0..1u64 << (n * n) {
            let r = Rel::from_code(n, code);
            if !r.holds(QuasiOrder) {
                continue;
            }
            if n == 3 {
                quasi += 1;
            }
            let fits = r.prefix().iter().enumerate().all(|(k, v)| match v {
                Some(b) => w.base.value(relation_rarity::pairing::PairIndex::new(k as u64 + 1).unwrap()).is_none_or(|d| d == *b),
                None => true,
            });
            if fits {
                consistent += 1;
                if !r.holds(PartialOrder) {
                    return fail(format!("quasi-order code {code} on {n} points fits the witness but is not a partial order"));
                }
            }
        }
    }
    if quasi != 29 {
        return fail(format!("oracle found {quasi} quasi-orders on 3 points"));
    }
    pass(format!("ForcedSubset relative to quasi-orders; {consistent} of the quasi-orders on ≤ 3 points fit the witness, all partial orders"))
}

fn criterion_7() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        out_dir: dir.path().to_path_buf(),
        samples: TABLE_SAMPLES,
        ..RunConfig::default()
    };
    let expected: Vec<(&str, [&str; 3])> = vec![
        ("Transitivity", ["yes", "no", "no"]),
        ("Asymmetry", ["yes", "no", "no"]),
        ("Antisymmetry", ["yes", "no", "no"]),
        ("Irreflexivity", ["yes", "no", "no"]),
        ("Reflexivity", ["yes", "yes", "no"]),
        ("Symmetry", ["yes", "yes", "no"]),
        ("Completeness", ["yes", "yes", "no"]),
        ("Linearity", ["yes", "yes", "open"]),
        ("Equivalence", ["yes", "yes", "open"]),
        ("Anonymity", ["yes", "yes", "no"]),
        ("Paretian", ["yes", "yes", "no"]),
        ("Strong equity", ["yes", "yes", "no"]),
    ];
    let mut rows = Vec::new();
    for which in [TableKind::Basic, TableKind::Egalitarian] {
        match cli_reports::smallness_table(&cfg, which) {
            Ok(t) => rows.extend(t.rows),
            Err(e) => return fail(e.to_string()),
        }
    }
    let mut mismatches = Vec::new();
    let mut evidence_problems = Vec::new();
    for ((label, want), row) in expected.iter().zip(&rows) {
        assert_eq!(*label, row.label);
        for ((col, cell), want) in [("γ", &row.gamma), ("ε", &row.epsilon), ("δ", &row.delta)].into_iter().zip(want) {
            if cell.value != *want {
                mismatches.push(format!("{label} {col}: got {}, expected {want} ({})", cell.value, cell.note));
            }
            if let Err(e) = check_evidence(dir.path(), &cell.value, cell.evidence.as_deref()) {
                evidence_problems.push(format!("{label} {col}: {e}"));
            }
        }
    }
    let detail = format!(
        "{} cells, {} mismatched, {} with bad evidence{}{}",
        rows.len() * 3,
        mismatches.len(),
        evidence_problems.len(),
        if mismatches.is_empty() { String::new() } else { format!(": {}", mismatches.join("; ")) },
        if evidence_problems.is_empty() { String::new() } else { format!("; {}", evidence_problems.join("; ")) }
    );
    if mismatches.is_empty() && evidence_problems.is_empty() {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn check_evidence(dir: &Path, value: &str, evidence: Option<&str>) -> Result<(), String> {
    let path = dir.join(evidence.ok_or("no evidence file")?);
    let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
    match value {
        "yes" => {
            let refuted = text.lines().skip(1).filter(|l| l.contains("\"refuted\":true")).count() as u64;
            if refuted < TABLE_SAMPLES {
                return Err(format!("only {refuted} logged refutations"));
            }
        }
        "no" => {
            let r = theorem_lab::recheck_file(&path).map_err(|e| e.to_string())?;
            if r.kind != CertificateKind::Witness {
                return Err("evidence is not a witness certificate".into());
            }
        }
        _ => {
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let blocked = v["candidates"].as_array().is_some_and(|c| c.iter().any(|c| !c["blocking"].is_null()));
            if !blocked {
                return Err("open-cell report lists no blocking constraint".into());
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let t = Instant::now();
    let engine = Engine::default();
    let mut checks = 0u64;
    let mut at3 = 0u64;
    for n in 1..=3usize {
        for code in 0..1u64 << (n * n) {
            let r = Rel::from_code(n, code);
            let w = r.prefix();
            let len = w.len() as u64;
            for p in PropertyId::BASIC {
                let compiled = matches!(engine.verdict_on_partial_word(&w, p, len), WordVerdict::ConsistentUpTo(_));
                if compiled != r.holds(p) {
                    return fail(format!("{p} on code {code} (n={n}): compiled {compiled}, definition {}", r.holds(p)));
                }
                checks += 1;
                at3 += (n == 3) as u64;
            }
        }
    }
    timed(C8_RUNTIME, t, pass(format!("{checks} relation-property checks agree ({at3} at n=3 over all 11 properties)")))
}

fn criterion_9() -> Check {
    let runs: Vec<Vec<String>> = vec![
        vec!["count".into(), "--n-max".into(), "4".into()],
        vec!["table".into(), "basic".into()],
        vec!["table".into(), "egalitarian".into()],
        vec!["witness".into(), "--properties".into(), "transitive,paretian,symmetric".into(), "--topology".into(), "delta".into()],
        vec!["refute".into(), "--properties".into(), "partial_order".into(), "--topology".into(), "gamma_Q".into(), "--seed".into(), "7".into()],
        vec!["explore-corollary1".into()],
    ];
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (d, threads) in dirs.iter().zip(["1", "8", "8"]) {
        for args in &runs {
            let mut full = vec!["relrarity".to_string()];
            full.extend(args.iter().cloned());
            full.extend(["--threads".into(), threads.into(), "--out-dir".into(), d.path().display().to_string()]);
            let (mut o, mut e) = (Vec::new(), Vec::new());
            let code = cli_reports::run(&full, &mut o, &mut e);
            if code != 0 {
                return fail(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&e)));
            }
        }
    }
    let listing = |d: &Path| -> Vec<(String, Vec<u8>)> {
        let mut out = Vec::new();
        let mut stack = vec![d.to_path_buf()];
        while let Some(p) = stack.pop() {
            for e in fs::read_dir(&p).unwrap() {
                let e = e.unwrap().path();
                if e.is_dir() {
                    stack.push(e);
                } else {
                    out.push((e.strip_prefix(d).unwrap().display().to_string(), fs::read(&e).unwrap()));
                }
            }
        }
        out.sort();
        out
    };
    let a = listing(dirs[0].path());
    for (d, label) in [(&dirs[1], "8 threads"), (&dirs[2], "repeat")] {
        let b = listing(d.path());
        if a != b {
            let names: Vec<&String> = a.iter().zip(&b).filter(|(x, y)| x != y).map(|(x, _)| &x.0).collect();
            return fail(format!("{label} differs from 1 thread: {names:?}"));
        }
    }
    pass(format!("{} output files byte-identical across 1 thread, 8 threads and a repeat run", a.len()))
}

type Criterion = (u32, &'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "closed-form counts", criterion_1),
        (2, "sequence counts", criterion_2),
        (3, "ratio trends", criterion_3),
        (4, "ε witnesses", criterion_4),
        (5, "refuter sweeps", criterion_5),
        (6, "relative ε_Q witness", criterion_6),
        (7, "smallness tables", criterion_7),
        (8, "compiled vs definitional", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str()) || *x == n.to_string()) {
            continue;
        }
        let o = f();
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as u32;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
