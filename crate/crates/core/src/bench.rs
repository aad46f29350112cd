//! Benchmark suites driven by a TOML configuration.
//!
//! Every (network, method, lambda mode) combination is run under every
//! listed splitter and scored against the ground truth. The full grid, a
//! best-per-metric table, the failures and the phase timings are written to
//! the output directory.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{multiway, spectral_order, split_order, ClusterOptions, ClusterRun, Method, Splitter};
use crate::cuts::Direction;
use crate::error::{Error, Result};
use crate::extract::extract_paired_communities;
use crate::graph::Graph;
use crate::io::{partition_from_labels, read_communities, read_graph, read_labels_file};
use crate::metrics::{evaluate, EvalReport};
use crate::partition::Partition;
use crate::selection::{select_by_cut, select_by_density, select_by_truth, LambdaGrid, OracleMetric};
use crate::triangles::{enumerate_triangles, TriangleIndex};

/// How the mixing parameter of a run is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    Fixed(f64),
    /// Selected without ground truth: by the sweep criterion for sweeps, by
    /// triangle density for k-means.
    Auto,
    /// Selected against the ground truth.
    Oracle,
}

impl fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMode::Fixed(x) => write!(f, "{x}"),
            LambdaMode::Auto => f.write_str("auto"),
            LambdaMode::Oracle => f.write_str("oracle"),
        }
    }
}

impl FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(LambdaMode::Auto),
            "oracle" => Ok(LambdaMode::Oracle),
            other => {
                let x: f64 = other.parse().map_err(|_| Error::Config(format!("invalid lambda mode {s:?}")))?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::LambdaOutOfRange(x));
                }
                Ok(LambdaMode::Fixed(x))
            }
        }
    }
}

impl<'de> Deserialize<'de> for LambdaMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(x) => x.to_string(),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for LambdaMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub name: String,
    pub graph: PathBuf,
    #[serde(default)]
    pub truth: Option<PathBuf>,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Community file; when present the network is a paired-community suite.
    #[serde(default)]
    pub communities: Option<PathBuf>,
    #[serde(default = "default_top")]
    pub top: usize,
    #[serde(default = "default_max_size")]
    pub max_size: usize,
}

fn default_k() -> usize {
    2
}
fn default_top() -> usize {
    500
}
fn default_max_size() -> usize {
    200
}
fn default_seed() -> u64 {
    42
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("bench-out")
}
fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}
fn default_modes() -> Vec<LambdaMode> {
    vec![LambdaMode::Fixed(0.5), LambdaMode::Auto, LambdaMode::Oracle]
}
fn default_criteria() -> Vec<String> {
    vec!["all".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub networks: Vec<NetworkConfig>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_modes")]
    pub lambda_modes: Vec<LambdaMode>,
    #[serde(default)]
    pub grid: LambdaGrid,
    /// Splitter tags; `all` expands to every sweep criterion plus `km`.
    #[serde(default = "default_criteria")]
    pub criteria: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub threads: usize,
}

impl BenchConfig {
    pub fn from_toml_str(text: &str) -> Result<BenchConfig> {
        let cfg: BenchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn from_path(path: &Path) -> Result<BenchConfig> {
        let mut cfg = Self::from_toml_str(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for net in &mut cfg.networks {
            resolve(&mut net.graph);
            net.truth.as_mut().map(resolve);
            net.communities.as_mut().map(resolve);
        }
        resolve(&mut cfg.out_dir);
        Ok(cfg)
    }

    pub fn splitters(&self) -> Result<Vec<Splitter>> {
        let mut out = Vec::new();
        for tag in &self.criteria {
            if tag.eq_ignore_ascii_case("all") {
                out.extend(Splitter::all());
            } else {
                out.push(tag.parse().map_err(|e: Error| Error::Config(e.to_string()))?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        if self.networks.is_empty() || self.methods.is_empty() || self.lambda_modes.is_empty() {
            return Err(Error::Config("networks, methods and lambda_modes must be nonempty".into()));
        }
        if self.splitters()?.is_empty() {
            return Err(Error::Config("no criteria listed".into()));
        }
        let oracle = self.lambda_modes.contains(&LambdaMode::Oracle);
        for net in &self.networks {
            if net.k < 2 {
                return Err(Error::Config(format!("network {}: k must be at least 2", net.name)));
            }
            if oracle && net.truth.is_none() && net.communities.is_none() {
                return Err(Error::Config(format!("network {}: oracle mode needs a truth file", net.name)));
            }
            if net.communities.is_some() && net.k != 2 {
                return Err(Error::Config(format!("network {}: paired suites are bi-partitions", net.name)));
            }
        }
        Ok(())
    }
}

/// One row of the full result grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub network: String,
    pub method: Method,
    pub mode: String,
    /// Oracle target metric; empty for other modes.
    pub target: String,
    pub splitter: String,
    /// Mixing parameter used (mean over pairs for suites).
    pub lambda: f64,
    /// Number of networks averaged into the row.
    pub count: usize,
    pub eps_n: Option<f64>,
    pub eps_e: Option<f64>,
    pub eps_t: Option<f64>,
    pub nmi: Option<f64>,
    pub criterion_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub network: String,
    pub method: Method,
    pub mode: String,
    pub metric: String,
    pub value: f64,
    pub splitter: String,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub network: String,
    pub method: Method,
    pub mode: String,
    pub splitter: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub load_ms: f64,
    pub triangles_ms: f64,
    /// Operator construction plus eigensolve, summed over runs.
    pub spectral_ms: f64,
    /// Sweep cuts and k-means, summed over runs.
    pub split_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub grid: Vec<GridRow>,
    pub best: Vec<BestRow>,
    pub failures: Vec<FailureRow>,
    pub timings: BTreeMap<String, PhaseTimings>,
    /// Notes from loading and extraction.
    pub notes: Vec<String>,
}

/// A network ready to cluster.
struct Prepared {
    name: String,
    graph: Graph,
    triangles: TriangleIndex,
    truth: Option<Partition>,
    k: usize,
}

type RunOutcome = std::result::Result<ClusterRun, String>;

/// Runs of one method at one grid value, keyed by splitter.
struct LambdaRuns {
    lambda: f64,
    runs: BTreeMap<Splitter, RunOutcome>,
    spectral_ms: f64,
    split_ms: f64,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn runs_at(net: &Prepared, method: Method, lambda: f64, splitters: &[Splitter], opts: &ClusterOptions) -> LambdaRuns {
    let mut runs = BTreeMap::new();
    if net.k > 2 {
        let t = Instant::now();
        runs.insert(Splitter::KMeans, multiway(&net.graph, &net.triangles, method, lambda, net.k, opts).map_err(|e| e.to_string()));
        return LambdaRuns { lambda, runs, spectral_ms: 0.0, split_ms: ms(t) };
    }
    let t = Instant::now();
    let so = spectral_order(&net.graph, &net.triangles, method, lambda, opts);
    let spectral_ms = ms(t);
    let t = Instant::now();
    match so.and_then(|so| split_order(&net.graph, &net.triangles, &so, splitters, opts)) {
        Ok(list) => {
            for (s, r) in splitters.iter().zip(list) {
                runs.insert(*s, r.map_err(|e| e.to_string()));
            }
        }
        Err(e) => {
            for s in splitters {
                runs.insert(*s, Err(e.to_string()));
            }
        }
    }
    LambdaRuns { lambda, runs, spectral_ms, split_ms: ms(t) }
}

/// Result of one (method, mode, splitter, target) cell on one network.
struct Cell {
    mode: String,
    target: String,
    splitter: Splitter,
    outcome: std::result::Result<(f64, Option<f64>, Option<EvalReport>), String>,
}

fn cells_for(net: &Prepared, method: Method, cfg: &BenchConfig, splitters: &[Splitter], opts: &ClusterOptions) -> (Vec<Cell>, PhaseTimings) {
    let splitters: Vec<Splitter> = if net.k > 2 { vec![Splitter::KMeans] } else { splitters.to_vec() };
    let modes: Vec<LambdaMode> = match method.fixed_lambda() {
        Some(x) => vec![LambdaMode::Fixed(x)],
        None => cfg.lambda_modes.clone(),
    };
    let mut lambdas: Vec<f64> = Vec::new();
    for m in &modes {
        match m {
            LambdaMode::Fixed(x) => lambdas.push(*x),
            LambdaMode::Oracle if net.truth.is_none() => {}
            _ => lambdas.extend(cfg.grid.values()),
        }
    }
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();

    let per_lambda: Vec<LambdaRuns> =
        lambdas.par_iter().map(|&l| runs_at(net, method, l, &splitters, opts)).collect();
    let mut timings = PhaseTimings::default();
    for lr in &per_lambda {
        timings.spectral_ms += lr.spectral_ms;
        timings.split_ms += lr.split_ms;
    }
    let score = |run: &ClusterRun| -> (f64, Option<f64>, Option<EvalReport>) {
        let eval = net.truth.as_ref().and_then(|t| evaluate(t, &run.partition, &net.graph, &net.triangles).ok());
        (run.lambda, run.criterion_value, eval)
    };
    let grid_runs = |s: Splitter| -> Vec<(f64, Result<ClusterRun>)> {
        per_lambda
            .iter()
            .filter(|lr| cfg.grid.values().contains(&lr.lambda))
            .map(|lr| (lr.lambda, lr.runs[&s].clone().map_err(Error::Domain)))
            .collect()
    };

    let mut cells = Vec::new();
    for mode in &modes {
        for &s in &splitters {
            match mode {
                LambdaMode::Fixed(x) => {
                    let lr = per_lambda.iter().find(|lr| lr.lambda == *x).expect("fixed lambda was run");
                    let outcome = lr.runs[&s].as_ref().map(score).map_err(Clone::clone);
                    let mode = if method.fixed_lambda().is_some() { "fixed".to_string() } else { mode.to_string() };
                    cells.push(Cell { mode, target: String::new(), splitter: s, outcome });
                }
                LambdaMode::Auto => {
                    let selection = match s {
                        Splitter::Sweep(c) => select_by_cut(grid_runs(s), c),
                        Splitter::KMeans => select_by_density(grid_runs(s), &net.triangles),
                    };
                    let outcome = selection.map(|sel| score(&sel.run)).map_err(|e| e.to_string());
                    cells.push(Cell { mode: "auto".into(), target: String::new(), splitter: s, outcome });
                }
                LambdaMode::Oracle => {
                    let Some(truth) = &net.truth else { continue };
                    for metric in OracleMetric::ALL {
                        let outcome = select_by_truth(grid_runs(s), truth, metric, &net.graph, &net.triangles)
                            .map(|sel| score(&sel.run))
                            .map_err(|e| e.to_string());
                        cells.push(Cell { mode: "oracle".into(), target: metric.tag().into(), splitter: s, outcome });
                    }
                }
            }
        }
    }
    (cells, timings)
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values {
        sum += v?;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

fn prepare_single(net: &NetworkConfig) -> Result<(Prepared, PhaseTimings)> {
    let mut timings = PhaseTimings::default();
    let t = Instant::now();
    let loaded = read_graph(&net.graph)?;
    let mut graph = loaded.graph;
    let truth = match &net.truth {
        Some(path) => {
            let labels = read_labels_file(path)?;
            graph = graph.with_nodes(labels.iter().map(|(id, _)| *id));
            Some(partition_from_labels(&graph, &labels)?)
        }
        None => None,
    };
    timings.load_ms = ms(t);
    let t = Instant::now();
    let triangles = enumerate_triangles(&graph);
    timings.triangles_ms = ms(t);
    Ok((Prepared { name: net.name.clone(), graph, triangles, truth, k: net.k }, timings))
}

fn prepare_suite(net: &NetworkConfig, notes: &mut Vec<String>) -> Result<(Vec<Prepared>, PhaseTimings)> {
    let mut timings = PhaseTimings::default();
    let t = Instant::now();
    let graph = read_graph(&net.graph)?.graph;
    let path = net.communities.as_ref().expect("suite has communities");
    let comms = read_communities(std::io::BufReader::new(fs::File::open(path)?))?;
    let extraction = extract_paired_communities(&graph, &comms, net.top, net.max_size)?;
    timings.load_ms = ms(t);
    notes.extend(extraction.skipped.iter().map(|s| format!("{}: {s}", net.name)));
    let t = Instant::now();
    let pairs = extraction
        .pairs
        .into_iter()
        .enumerate()
        .map(|(i, p)| Prepared {
            name: format!("{}#{i}", net.name),
            triangles: enumerate_triangles(&p.graph),
            graph: p.graph,
            truth: Some(p.truth),
            k: 2,
        })
        .collect();
    timings.triangles_ms = ms(t);
    Ok((pairs, timings))
}

/// Runs every configured combination. Individual failures are recorded and
/// never abort the suite; only configuration and input errors do.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_inner(cfg))
}

fn run_inner(cfg: &BenchConfig) -> Result<BenchReport> {
    let splitters = cfg.splitters()?;
    let opts = ClusterOptions::seeded(cfg.seed);
    let mut report = BenchReport {
        grid: Vec::new(),
        best: Vec::new(),
        failures: Vec::new(),
        timings: BTreeMap::new(),
        notes: Vec::new(),
    };
    for net in &cfg.networks {
        let (members, mut timings) = if net.communities.is_some() {
            prepare_suite(net, &mut report.notes)?
        } else {
            let (p, t) = prepare_single(net)?;
            (vec![p], t)
        };
        if members.is_empty() {
            report.notes.push(format!("{}: no paired networks extracted", net.name));
        }
        for &method in &cfg.methods {
            let results: Vec<(Vec<Cell>, PhaseTimings)> =
                members.par_iter().map(|p| cells_for(p, method, cfg, &splitters, &opts)).collect();
            // group cells by (mode, target, splitter) in first-seen order
            let mut groups: Vec<(GroupKey, Vec<GroupEntry>)> = Vec::new();
            for (member, (cells, t)) in members.iter().zip(results) {
                timings.spectral_ms += t.spectral_ms;
                timings.split_ms += t.split_ms;
                for cell in cells {
                    let key = (cell.mode.clone(), cell.target.clone(), cell.splitter);
                    let slot = match groups.iter().position(|(k, _)| *k == key) {
                        Some(i) => i,
                        None => {
                            groups.push((key, Vec::new()));
                            groups.len() - 1
                        }
                    };
                    match cell.outcome {
                        Ok(v) => groups[slot].1.push(v),
                        Err(error) => report.failures.push(FailureRow {
                            network: member.name.clone(),
                            method,
                            mode: cell.mode,
                            splitter: cell.splitter.to_string(),
                            error,
                        }),
                    }
                }
            }
            for ((mode, target, splitter), values) in groups {
                if values.is_empty() {
                    continue;
                }
                let field = |f: fn(&EvalReport) -> f64| mean(values.iter().map(|(_, _, e)| e.as_ref().map(f)));
                report.grid.push(GridRow {
                    network: net.name.clone(),
                    method,
                    mode,
                    target,
                    splitter: splitter.to_string(),
                    lambda: mean(values.iter().map(|v| Some(v.0))).unwrap_or(f64::NAN),
                    count: values.len(),
                    eps_n: field(|e| e.eps_n),
                    eps_e: field(|e| e.eps_e),
                    eps_t: field(|e| e.eps_t),
                    nmi: field(|e| e.nmi),
                    criterion_value: mean(values.iter().map(|v| v.1)),
                });
            }
        }
        report.timings.insert(net.name.clone(), timings);
    }
    report.best = best_table(&report.grid);
    Ok(report)
}

type GroupKey = (String, String, Splitter);
type GroupEntry = (f64, Option<f64>, Option<EvalReport>);
type MetricFn = fn(&GridRow) -> Option<f64>;

/// Best grid entry per (network, method, mode, metric); ties keep the first
/// row in grid order.
pub fn best_table(grid: &[GridRow]) -> Vec<BestRow> {
    let metrics: [(&str, MetricFn, Direction); 4] = [
        ("eps_n", |r| r.eps_n, Direction::Minimize),
        ("eps_e", |r| r.eps_e, Direction::Minimize),
        ("eps_t", |r| r.eps_t, Direction::Minimize),
        ("nmi", |r| r.nmi, Direction::Maximize),
    ];
    let mut keys: Vec<(String, Method, String)> = Vec::new();
    for r in grid {
        let key = (r.network.clone(), r.method, r.mode.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut out = Vec::new();
    for (network, method, mode) in keys {
        let rows: Vec<&GridRow> =
            grid.iter().filter(|r| r.network == network && r.method == method && r.mode == mode).collect();
        for (name, get, dir) in metrics {
            let mut best: Option<(&GridRow, f64)> = None;
            for r in &rows {
                if let Some(v) = get(r) {
                    let better = best.is_none_or(|(_, b)| match dir {
                        Direction::Minimize => v < b,
                        Direction::Maximize => v > b,
                    });
                    if better {
                        best = Some((r, v));
                    }
                }
            }
            if let Some((r, value)) = best {
                out.push(BestRow {
                    network: network.clone(),
                    method,
                    mode: mode.clone(),
                    metric: name.into(),
                    value,
                    splitter: r.splitter.clone(),
                    lambda: r.lambda,
                });
            }
        }
    }
    out
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    if rows.is_empty() {
        w.write_record(header).map_err(csv_error)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Writes `grid.csv`, `best.csv`, `failures.csv`, `report.json` and
/// `timings.json` into `dir`. Everything except the timings is a pure
/// function of the configuration.
pub fn write_report(report: &BenchReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_csv(
        &dir.join("grid.csv"),
        &report.grid,
        &["network", "method", "mode", "target", "splitter", "lambda", "count", "eps_n", "eps_e", "eps_t", "nmi", "criterion_value"],
    )?;
    write_csv(&dir.join("best.csv"), &report.best, &["network", "method", "mode", "metric", "value", "splitter", "lambda"])?;
    write_csv(&dir.join("failures.csv"), &report.failures, &["network", "method", "mode", "splitter", "error"])?;
    #[derive(Serialize)]
    struct Json<'a> {
        grid: &'a [GridRow],
        best: &'a [BestRow],
        failures: &'a [FailureRow],
        notes: &'a [String],
    }
    let json = Json { grid: &report.grid, best: &report.best, failures: &report.failures, notes: &report.notes };
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&json)?)?;
    fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&report.timings)?)?;
    Ok(())
}
