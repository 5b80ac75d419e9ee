//! Command-line front end: configuration layering, the subcommands, and
//! the report files they write.
//!
//! Configuration precedence is flags > config file > defaults. The
//! `--override-json` flag counts as a flag; explicit flags still win over it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cylinders::Collection;
use crate::egalitarian::{StreamSpaceConfig, ValueSet};
use crate::finite_lab::{self, MAX_BRUTE_N};
use crate::property_engine::{Engine, PropertyId, DEFAULT_VERDICT_BOUND};
use crate::theorem_lab::{self, Topology};
use PropertyId::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_BAD_CONFIG,
            CliError::Validation(_) | CliError::Io(_) => EXIT_VALIDATION,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "relrarity", about = "Rarity of relation properties in Cantor space", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Basic,
    Egalitarian,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count relations on small finite sets; writes counts.csv and ratios.json.
    Count,
    /// Render the smallness table with its certificates and sweep logs.
    Table {
        #[arg(value_enum, default_value = "basic")]
        which: TableKind,
    },
    /// Write the witness certificate for each property in a topology.
    Witness,
    /// Run the refuter on generated cylinders; certifies the first one.
    Refute,
    /// Search compositions of basic witnesses for a δ-cylinder inside
    /// linear orders or equivalences.
    #[command(name = "explore-corollary1")]
    ExploreCorollary1,
    /// Re-validate certificate files.
    Recheck {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub n_max: Option<u32>,
    /// Comma-separated property names.
    #[arg(long, global = true)]
    pub properties: Option<String>,
    /// gamma, epsilon, delta, or a relative form such as epsilon_T, gamma_Q, epsilon@quasi_order.
    #[arg(long, global = true)]
    pub topology: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub prefix_len: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub search_bound: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stream_length: Option<usize>,
    #[arg(long, global = true)]
    pub value_set: Option<String>,
    /// Flat key=value file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON object with the same keys as the config file.
    #[arg(long, global = true)]
    pub override_json: Option<String>,
}

/// One configuration layer; unset keys fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub n_max: Option<u32>,
    pub properties: Option<String>,
    pub topology: Option<String>,
    pub seed: Option<u64>,
    pub prefix_len: Option<u64>,
    pub samples: Option<u64>,
    pub search_bound: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub stream_length: Option<usize>,
    pub value_set: Option<String>,
}

impl ConfigPatch {
    /// `key = value` lines; blank lines and `#` comments are ignored.
    pub fn parse_flat(text: &str) -> Result<ConfigPatch, CliError> {
        let mut map = serde_json::Map::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", no + 1)))?;
            let (k, v) = (k.trim().replace('-', "_"), v.trim());
            let numeric = matches!(
                k.as_str(),
                "n_max" | "seed" | "prefix_len" | "samples" | "search_bound" | "threads" | "stream_length"
            );
            let value = if numeric {
                serde_json::Value::from(
                    v.parse::<u64>()
                        .map_err(|_| CliError::Config(format!("line {}: {k} must be a non-negative integer", no + 1)))?,
                )
            } else {
                serde_json::Value::from(v)
            };
            map.insert(k, value);
        }
        serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn parse_json(text: &str) -> Result<ConfigPatch, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("--override-json: {e}")))
    }

    fn from_flags(f: &Flags) -> ConfigPatch {
        ConfigPatch {
            n_max: f.n_max,
            properties: f.properties.clone(),
            topology: f.topology.clone(),
            seed: f.seed,
            prefix_len: f.prefix_len,
            samples: f.samples,
            search_bound: f.search_bound,
            threads: f.threads,
            out_dir: f.out_dir.clone(),
            stream_length: f.stream_length,
            value_set: f.value_set.clone(),
        }
    }

    /// `self` over `lower`.
    fn over(self, lower: ConfigPatch) -> ConfigPatch {
        ConfigPatch {
            n_max: self.n_max.or(lower.n_max),
            properties: self.properties.or(lower.properties),
            topology: self.topology.or(lower.topology),
            seed: self.seed.or(lower.seed),
            prefix_len: self.prefix_len.or(lower.prefix_len),
            samples: self.samples.or(lower.samples),
            search_bound: self.search_bound.or(lower.search_bound),
            threads: self.threads.or(lower.threads),
            out_dir: self.out_dir.or(lower.out_dir),
            stream_length: self.stream_length.or(lower.stream_length),
            value_set: self.value_set.or(lower.value_set),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub n_max: u32,
    pub properties: Option<Vec<PropertyId>>,
    pub topology: Option<Topology>,
    pub seed: u64,
    pub prefix_len: u64,
    pub samples: u64,
    pub search_bound: u64,
    /// `None`: all available parallelism.
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub stream_space: StreamSpaceConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: 4,
            properties: None,
            topology: None,
            seed: 0,
            prefix_len: 500,
            samples: 500,
            search_bound: DEFAULT_VERDICT_BOUND,
            threads: None,
            out_dir: PathBuf::from("out"),
            stream_space: StreamSpaceConfig::default(),
        }
    }
}

fn positive(name: &str, v: u64) -> Result<u64, CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("{name} must be positive")));
    }
    Ok(v)
}

pub fn parse_properties(s: &str) -> Result<Vec<PropertyId>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| PropertyId::parse(p).ok_or_else(|| CliError::Config(format!("unknown property {p:?}"))))
        .collect()
}

impl RunConfig {
    /// Layers flags over the config file over the defaults and validates.
    pub fn resolve(flags: &Flags) -> Result<RunConfig, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ConfigPatch::parse_flat(&text)?
            }
            None => ConfigPatch::default(),
        };
        let json = match &flags.override_json {
            Some(text) => ConfigPatch::parse_json(text)?,
            None => ConfigPatch::default(),
        };
        RunConfig::from_patch(ConfigPatch::from_flags(flags).over(json).over(file))
    }

    pub fn from_patch(p: ConfigPatch) -> Result<RunConfig, CliError> {
        let d = RunConfig::default();
        let n_max = p.n_max.unwrap_or(d.n_max);
        if !(1..=MAX_BRUTE_N).contains(&n_max) {
            return Err(CliError::Config(format!("n_max must be in 1..={MAX_BRUTE_N}")));
        }
        let stream_length = p.stream_length.unwrap_or(d.stream_space.stream_length);
        if stream_length == 0 {
            return Err(CliError::Config("stream_length must be positive".into()));
        }
        let value_set = match p.value_set {
            Some(v) => ValueSet::parse(&v).ok_or_else(|| CliError::Config(format!("unknown value set {v:?}")))?,
            None => d.stream_space.value_set,
        };
        let topology = match p.topology {
            Some(t) => Some(Topology::parse(&t).ok_or_else(|| CliError::Config(format!("unknown topology {t:?}")))?),
            None => None,
        };
        Ok(RunConfig {
            n_max,
            properties: p.properties.as_deref().map(parse_properties).transpose()?,
            topology,
            seed: p.seed.unwrap_or(d.seed),
            prefix_len: positive("prefix_len", p.prefix_len.unwrap_or(d.prefix_len))?,
            samples: positive("samples", p.samples.unwrap_or(d.samples))?,
            search_bound: positive("search_bound", p.search_bound.unwrap_or(d.search_bound))?,
            threads: match p.threads {
                Some(0) => return Err(CliError::Config("threads must be positive".into())),
                t => t,
            },
            out_dir: p.out_dir.unwrap_or(d.out_dir),
            stream_space: StreamSpaceConfig {
                stream_length,
                value_set,
            },
        })
    }

    pub fn engine(&self) -> Engine {
        Engine::new(self.stream_space, self.search_bound)
    }

    fn require_properties(&self) -> Result<&[PropertyId], CliError> {
        self.properties
            .as_deref()
            .filter(|p| !p.is_empty())
            .ok_or_else(|| CliError::Config("--properties is required".into()))
    }

    fn require_topology(&self) -> Result<Topology, CliError> {
        self.topology.ok_or_else(|| CliError::Config("--topology is required".into()))
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Human-readable output goes to `out`, errors to `err`.
pub fn run<I, T>(args: I, out: &mut (dyn io::Write + Send), err: &mut (dyn io::Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    if let Command::Recheck { paths } = &cli.command {
        return cmd_recheck(paths, out);
    }
    let cfg = RunConfig::resolve(&cli.flags)?;
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        b = b.num_threads(t);
    }
    let pool = b.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Count => cmd_count(&cfg, out),
        Command::Table { which } => cmd_table(&cfg, *which, out),
        Command::Witness => cmd_witness(&cfg, out),
        Command::Refute => cmd_refute(&cfg, out),
        Command::ExploreCorollary1 => cmd_explore(&cfg, out),
        Command::Recheck { .. } => unreachable!(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// `n,property,count,source` rows for `n = 1..=n_max`.
pub fn counts_csv(n_max: u32, props: &[PropertyId], threads: Option<usize>) -> Result<String, CliError> {
    let mut csv = String::from("n,property,count,source\n");
    for n in 1..=n_max {
        let brute = finite_lab::count_brute_many(n, props, threads).map_err(|e| CliError::Config(e.to_string()))?;
        writeln!(csv, "{n},all,{},closed_form", finite_lab::all_relations(n)).unwrap();
        for (&p, c) in props.iter().zip(&brute) {
            writeln!(csv, "{n},{},{c},brute", p.name()).unwrap();
            if let Ok(cf) = finite_lab::closed_form(n, p) {
                writeln!(csv, "{n},{},{cf},closed_form", p.name()).unwrap();
            }
        }
    }
    Ok(csv)
}

pub fn cmd_count(cfg: &RunConfig, out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    let props = match &cfg.properties {
        Some(p) => p.clone(),
        None => PropertyId::BASIC.to_vec(),
    };
    if let Some(p) = props.iter().find(|p| p.is_egalitarian()) {
        return Err(CliError::Config(format!("{p} cannot be counted on finite sets")));
    }
    let csv = counts_csv(cfg.n_max, &props, cfg.threads)?;
    let ratios = finite_lab::ratio_report(cfg.n_max, cfg.threads).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(&cfg.out_dir.join("counts.csv"), &csv)?;
    write_file(&cfg.out_dir.join("ratios.json"), &json(&ratios))?;
    write!(out, "{csv}")?;
    for r in &ratios.reports {
        let line: Vec<String> = r.ratios.iter().map(|q| format!("{}={} ({})", q.name, q.exact, q.decimal)).collect();
        writeln!(out, "n={}: {}", r.n, line.join(", "))?;
    }
    writeln!(
        out,
        "Q/P strictly decreasing over n>=2: {}; P/T strictly decreasing over n>=2: {}",
        ratios.q_over_p_decreasing, ratios.p_over_t_decreasing
    )?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    /// `yes`, `no` or `open`.
    pub value: String,
    /// Certificate, sweep log or report path relative to the output directory.
    pub evidence: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub property: PropertyId,
    pub gamma: Cell,
    pub epsilon: Cell,
    pub delta: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmallnessTable {
    pub which: TableKind,
    pub stream_space: StreamSpaceConfig,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<TableRow>,
}

pub fn table_rows(which: TableKind) -> Vec<(&'static str, PropertyId)> {
    match which {
        TableKind::Basic => vec![
            ("Transitivity", Transitive),
            ("Asymmetry", Asymmetric),
            ("Antisymmetry", Antisymmetric),
            ("Irreflexivity", Irreflexive),
            ("Reflexivity", Reflexive),
            ("Symmetry", Symmetric),
            ("Completeness", Complete),
            ("Linearity", LinearOrder),
            ("Equivalence", Equivalence),
        ],
        TableKind::Egalitarian => vec![("Anonymity", Anonymous), ("Paretian", Paretian), ("Strong equity", StrongEquity)],
    }
}

fn rel(out_dir: &Path, p: &Path) -> String {
    p.strip_prefix(out_dir).unwrap_or(p).display().to_string()
}

fn sweep_cell(engine: &Engine, cfg: &RunConfig, p: PropertyId, t: Topology) -> Result<Cell, CliError> {
    let report = theorem_lab::sweep(engine, p, t, cfg.samples, cfg.seed);
    let path = cfg.out_dir.join("sweeps").join(format!("{}_{}.jsonl", p.name(), t.label()));
    write_file(&path, &report.to_jsonl())?;
    let evidence = Some(rel(&cfg.out_dir, &path));
    Ok(if report.all_refuted() {
        Cell {
            value: "yes".into(),
            evidence,
            note: format!("{} of {} generated cylinders refuted", report.refuted, report.samples),
        }
    } else {
        Cell {
            value: "open".into(),
            evidence,
            note: format!("refuter failed on {} of {} generated cylinders", report.samples - report.refuted, report.samples),
        }
    })
}

fn witness_cell(cfg: &RunConfig, cert: &theorem_lab::Certificate) -> Result<Cell, CliError> {
    let path = cert.write_to(&cfg.out_dir.join("certificates"))?;
    Ok(Cell {
        value: "no".into(),
        evidence: Some(rel(&cfg.out_dir, &path)),
        note: format!("{} forced inside", cert.base.description()),
    })
}

fn table_cell(engine: &Engine, cfg: &RunConfig, p: PropertyId, c: Collection) -> Result<Cell, CliError> {
    let t = Topology::plain(c);
    if let Some(w) = theorem_lab::witness_for(engine, p, t) {
        return witness_cell(cfg, &w);
    }
    if c == Collection::Delta {
        if matches!(p, LinearOrder | Equivalence) {
            let report = theorem_lab::explore_corollary1(engine, p, engine.bound())
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let path = cfg.out_dir.join("reports").join(format!("corollary1_{}.json", p.name()));
            write_file(&path, &json(&report))?;
            return Ok(Cell {
                value: "open".into(),
                evidence: Some(rel(&cfg.out_dir, &path)),
                note: "no δ witness constructed; blocking constraints listed in the report".into(),
            });
        }
        return Ok(Cell {
            value: "open".into(),
            evidence: None,
            note: "no witness and no δ refuter".into(),
        });
    }
    sweep_cell(engine, cfg, p, t)
}

pub fn smallness_table(cfg: &RunConfig, which: TableKind) -> Result<SmallnessTable, CliError> {
    let engine = cfg.engine();
    let mut rows = Vec::new();
    for (label, p) in table_rows(which) {
        rows.push(TableRow {
            label: label.into(),
            property: p,
            gamma: table_cell(&engine, cfg, p, Collection::Gamma)?,
            epsilon: table_cell(&engine, cfg, p, Collection::Epsilon)?,
            delta: table_cell(&engine, cfg, p, Collection::Delta)?,
        });
    }
    Ok(SmallnessTable {
        which,
        stream_space: cfg.stream_space,
        samples: cfg.samples,
        seed: cfg.seed,
        rows,
    })
}

pub fn render_table(t: &SmallnessTable) -> String {
    let mut s = String::new();
    writeln!(s, "{:<16}{:<10}{:<10}{:<10}", "Property", "γ-small", "ε-small", "δ-small").unwrap();
    for r in &t.rows {
        writeln!(s, "{:<16}{:<10}{:<10}{:<10}", r.label, r.gamma.value, r.epsilon.value, r.delta.value).unwrap();
    }
    writeln!(s).unwrap();
    for r in &t.rows {
        for (col, c) in [("γ", &r.gamma), ("ε", &r.epsilon), ("δ", &r.delta)] {
            let ev = c.evidence.as_deref().unwrap_or("-");
            writeln!(s, "{} {}: {} [{}] {}", r.label, col, c.value, ev, c.note).unwrap();
        }
    }
    s
}

pub fn cmd_table(cfg: &RunConfig, which: TableKind, out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    let t = smallness_table(cfg, which)?;
    let name = match which {
        TableKind::Basic => "basic",
        TableKind::Egalitarian => "egalitarian",
    };
    let text = render_table(&t);
    write_file(&cfg.out_dir.join(format!("table_{name}.txt")), &text)?;
    write_file(&cfg.out_dir.join(format!("table_{name}.json")), &json(&t))?;
    write!(out, "{text}")?;
    Ok(EXIT_OK)
}

pub fn cmd_witness(cfg: &RunConfig, out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    let props = cfg.require_properties()?;
    let t = cfg.require_topology()?;
    let engine = cfg.engine();
    let mut code = EXIT_OK;
    for &p in props {
        match theorem_lab::witness_for(&engine, p, t) {
            Some(w) => {
                let path = w.write_to(&cfg.out_dir.join("certificates"))?;
                writeln!(out, "{p} {t}: witness {} -> {}", w.base.description(), path.display())?;
            }
            None => {
                writeln!(out, "{p} {t}: no witness construction")?;
                code = EXIT_VALIDATION;
            }
        }
    }
    Ok(code)
}

pub fn cmd_refute(cfg: &RunConfig, out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    let props = cfg.require_properties()?;
    let t = cfg.require_topology()?;
    let engine = cfg.engine();
    let mut code = EXIT_OK;
    for &p in props {
        let report = theorem_lab::sweep(&engine, p, t, cfg.samples, cfg.seed);
        let log = cfg.out_dir.join("sweeps").join(format!("{}_{}.jsonl", p.name(), t.label()));
        write_file(&log, &report.to_jsonl())?;
        let first = theorem_lab::generate_cylinder(t, cfg.seed, 0);
        match theorem_lab::refute_small(&engine, &first, p) {
            Ok(cert) => {
                let path = cert.write_to(&cfg.out_dir.join("certificates"))?;
                let pair = cert.gamma_pair.map(|(a, b)| format!(", pair ({a}, {b})")).unwrap_or_default();
                writeln!(out, "{p} {t}: cylinder #0 refuted at {:?}{pair} -> {}", cert.extension.iter().map(|k| k.get()).collect::<Vec<_>>(), path.display())?;
            }
            Err(e) => writeln!(out, "{p} {t}: cylinder #0: {e}")?,
        }
        writeln!(
            out,
            "{p} {t}: {}/{} refuted, max extension {} -> {}",
            report.refuted,
            report.samples,
            report.max_extension,
            log.display()
        )?;
        if !report.all_refuted() {
            code = EXIT_VALIDATION;
        }
    }
    Ok(code)
}

pub fn cmd_explore(cfg: &RunConfig, out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    let props = cfg.properties.clone().unwrap_or_else(|| vec![LinearOrder, Equivalence]);
    let engine = cfg.engine();
    for p in props {
        let report = theorem_lab::explore_corollary1(&engine, p, cfg.search_bound.min(engine.bound()))
            .map_err(|e| CliError::Config(e.to_string()))?;
        let path = cfg.out_dir.join("reports").join(format!("corollary1_{}.json", p.name()));
        write_file(&path, &json(&report))?;
        writeln!(out, "{p}: ε half certified: {}", report.epsilon_certified)?;
        for r in &report.epsilon_refutations {
            writeln!(out, "  {r}")?;
        }
        for c in &report.candidates {
            let status = match (&c.invalid, &c.blocking, &c.certificate) {
                (Some(why), _, _) => format!("not a δ-cylinder: {why}"),
                (_, Some(b), _) => format!("blocked by {} ({:?} at {}): {}", b.conjunct, b.kind, b.index.map_or("-".into(), |k| k.to_string()), b.reason),
                (_, _, Some(cert)) => format!("forced inside: {cert}"),
                _ => "undetermined".into(),
            };
            writeln!(out, "  {}: {status}", c.name)?;
        }
        writeln!(out, "  {} -> {}", report.summary, path.display())?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_recheck(paths: &[PathBuf], out: &mut (dyn io::Write + Send)) -> Result<i32, CliError> {
    let mut failures = BTreeMap::new();
    for path in paths {
        if !path.is_file() {
            return Err(CliError::Config(format!("{} does not exist", path.display())));
        }
        match theorem_lab::recheck_file(path) {
            Ok(r) => {
                let pair = r.gamma_pair.map(|(a, b)| format!(", Γ pair ({a}, {b})")).unwrap_or_default();
                writeln!(out, "PASS {}: {:?} for {} in {}{pair}", path.display(), r.kind, r.property, r.topology)?;
            }
            Err(e) => {
                writeln!(out, "FAIL {}: {e}", path.display())?;
                failures.insert(path.clone(), e);
            }
        }
    }
    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Validation(format!("{} certificate(s) failed", failures.len())))
    }
}
