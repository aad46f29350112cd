//! Choosing the mixing parameter from a grid: by the cut criterion of the
//! resulting split, by within-cluster triangle density, or against a ground
//! truth.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{bipartition, multiway, ClusterOptions, ClusterRun, Method, Splitter};
use crate::cuts::{CutCriterion, Direction};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{epsilon_nodes, epsilon_structures, nmi, Structure};
use crate::partition::Partition;
use crate::triangles::TriangleIndex;

/// Candidate mixing parameters, ascending in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LambdaGrid {
    values: Vec<f64>,
}

impl LambdaGrid {
    pub fn new(mut values: Vec<f64>) -> Result<LambdaGrid> {
        if values.is_empty() {
            return Err(Error::Domain("lambda grid is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::LambdaOutOfRange(*bad));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(LambdaGrid { values })
    }

    /// `0, 1/steps, ..., 1`.
    pub fn uniform(steps: usize) -> LambdaGrid {
        let steps = steps.max(1);
        LambdaGrid { values: (0..=steps).map(|i| i as f64 / steps as f64).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid::uniform(10)
    }
}

impl TryFrom<Vec<f64>> for LambdaGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        LambdaGrid::new(v)
    }
}

impl From<LambdaGrid> for Vec<f64> {
    fn from(g: LambdaGrid) -> Vec<f64> {
        g.values
    }
}

/// What each grid point produces: a bi-partition or a `k`-way clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Bipartition(Splitter),
    Multiway(usize),
}

impl Task {
    pub fn run(
        self,
        graph: &Graph,
        triangles: &TriangleIndex,
        method: Method,
        lambda: f64,
        opts: &ClusterOptions,
    ) -> Result<ClusterRun> {
        match self {
            Task::Bipartition(s) => bipartition(graph, triangles, method, lambda, s, opts),
            Task::Multiway(k) => multiway(graph, triangles, method, lambda, k, opts),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    CutCriterion,
    TriangleDensity,
    Oracle,
}

/// Ground-truth metric minimized (or for NMI maximized) by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMetric {
    N,
    E,
    T,
    Nmi,
}

impl OracleMetric {
    pub const ALL: [OracleMetric; 4] = [OracleMetric::N, OracleMetric::E, OracleMetric::T, OracleMetric::Nmi];

    pub fn tag(self) -> &'static str {
        match self {
            OracleMetric::N => "eps_n",
            OracleMetric::E => "eps_e",
            OracleMetric::T => "eps_t",
            OracleMetric::Nmi => "nmi",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            OracleMetric::Nmi => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }

    pub fn score(self, truth: &Partition, cand: &Partition, graph: &Graph, triangles: &TriangleIndex) -> Result<f64> {
        match self {
            OracleMetric::N => Ok(epsilon_nodes(truth, cand)?.value),
            OracleMetric::E => Ok(epsilon_structures(truth, cand, Structure::Edge, graph, triangles)?.value),
            OracleMetric::T => Ok(epsilon_structures(truth, cand, Structure::Triangle, graph, triangles)?.value),
            OracleMetric::Nmi => nmi(truth, cand),
        }
    }
}

impl fmt::Display for OracleMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for OracleMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "eps_n" => Ok(OracleMetric::N),
            "e" | "eps_e" => Ok(OracleMetric::E),
            "t" | "eps_t" => Ok(OracleMetric::T),
            "nmi" => Ok(OracleMetric::Nmi),
            _ => Err(Error::Domain(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScore {
    pub lambda: f64,
    /// `None` when the run failed or the score was undefined.
    pub score: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub mode: SelectionMode,
    pub direction: Direction,
    pub scores: Vec<LambdaScore>,
    pub chosen: f64,
    pub chosen_score: f64,
}

impl SelectionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,score\n");
        for s in &self.scores {
            match s.score {
                Some(v) => out.push_str(&format!("{},{}\n", s.lambda, v)),
                None => out.push_str(&format!("{},\n", s.lambda)),
            }
        }
        out
    }
}

/// The selected mixing parameter and the run it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub report: SelectionReport,
    pub run: ClusterRun,
}

/// Picks the best scored candidate; the first (smallest lambda) wins ties.
pub fn choose(
    mode: SelectionMode,
    direction: Direction,
    candidates: Vec<(f64, Result<(f64, ClusterRun)>)>,
) -> Result<Selection> {
    let mut scores = Vec::with_capacity(candidates.len());
    let mut best: Option<(f64, f64, ClusterRun)> = None;
    for (lambda, outcome) in candidates {
        match outcome {
            Ok((score, run)) => {
                scores.push(LambdaScore { lambda, score: Some(score), note: None });
                let better = match &best {
                    None => true,
                    Some((_, b, _)) => match direction {
                        Direction::Minimize => score < *b,
                        Direction::Maximize => score > *b,
                    },
                };
                if better {
                    best = Some((lambda, score, run));
                }
            }
            Err(e) => scores.push(LambdaScore { lambda, score: None, note: Some(e.to_string()) }),
        }
    }
    let (chosen, chosen_score, run) =
        best.ok_or_else(|| Error::Domain("no grid value produced a usable clustering".into()))?;
    Ok(Selection { report: SelectionReport { mode, direction, scores, chosen, chosen_score }, run })
}

fn grid_runs(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    task: Task,
    grid: &LambdaGrid,
    opts: &ClusterOptions,
) -> Vec<(f64, Result<ClusterRun>)> {
    grid.values()
        .par_iter()
        .map(|&lambda| (lambda, task.run(graph, triangles, method, lambda, opts)))
        .collect()
}

/// Chooses the grid value whose sweep under `c` scores best. The score of a
/// grid point is the criterion at the selected cut, evaluated with that
/// point's own mixing parameter for `conx` and `congx`.
pub fn auto_lambda_cut(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    c: CutCriterion,
    grid: &LambdaGrid,
    opts: &ClusterOptions,
) -> Result<Selection> {
    let runs = grid_runs(graph, triangles, method, Task::Bipartition(Splitter::Sweep(c)), grid, opts);
    select_by_cut(runs, c)
}

/// Selection by cut criterion over runs that were already computed.
pub fn select_by_cut(runs: Vec<(f64, Result<ClusterRun>)>, c: CutCriterion) -> Result<Selection> {
    let candidates = runs
        .into_iter()
        .map(|(lambda, run)| {
            let scored = run.and_then(|r| match r.criterion_value {
                Some(v) => Ok((v, r)),
                None => Err(Error::Domain("run carries no criterion value".into())),
            });
            (lambda, scored)
        })
        .collect();
    choose(SelectionMode::CutCriterion, c.direction(), candidates)
}

/// Sum over clusters of (triangles inside the cluster) / (cluster size).
pub fn triangle_density(triangles: &TriangleIndex, partition: &Partition) -> f64 {
    let inside = triangles.count_within(partition.labels(), partition.k());
    inside.iter().zip(partition.sizes()).filter(|(_, s)| *s > 0).map(|(&t, s)| t as f64 / s as f64).sum()
}

/// Chooses the grid value whose `k`-way clustering has the largest
/// triangle density.
pub fn auto_lambda_density(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    task: Task,
    grid: &LambdaGrid,
    opts: &ClusterOptions,
) -> Result<Selection> {
    let runs = grid_runs(graph, triangles, method, task, grid, opts);
    select_by_density(runs, triangles)
}

pub fn select_by_density(runs: Vec<(f64, Result<ClusterRun>)>, triangles: &TriangleIndex) -> Result<Selection> {
    let candidates = runs
        .into_iter()
        .map(|(lambda, run)| (lambda, run.map(|r| (triangle_density(triangles, &r.partition), r))))
        .collect();
    choose(SelectionMode::TriangleDensity, Direction::Maximize, candidates)
}

/// Chooses the grid value whose output is closest to `truth` under
/// `metric`. Uses the ground truth, so it is a reference, not a method.
#[allow(clippy::too_many_arguments)]
pub fn oracle_lambda(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    task: Task,
    truth: &Partition,
    metric: OracleMetric,
    grid: &LambdaGrid,
    opts: &ClusterOptions,
) -> Result<Selection> {
    let runs = grid_runs(graph, triangles, method, task, grid, opts);
    select_by_truth(runs, truth, metric, graph, triangles)
}

pub fn select_by_truth(
    runs: Vec<(f64, Result<ClusterRun>)>,
    truth: &Partition,
    metric: OracleMetric,
    graph: &Graph,
    triangles: &TriangleIndex,
) -> Result<Selection> {
    let candidates = runs
        .into_iter()
        .map(|(lambda, run)| {
            let scored = run.and_then(|r| Ok((metric.score(truth, &r.partition, graph, triangles)?, r)));
            (lambda, scored)
        })
        .collect();
    choose(SelectionMode::Oracle, metric.direction(), candidates)
}
