//! Mixed-order spectral clustering and the edge-only and triangle-only
//! baselines, as bi-partitions via sweep cuts or as multiway k-means
//! clusterings of spectral embeddings.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cuts::{sweep_all, CutContext, CutCriterion, SweepCurve};
use crate::error::{check_lambda, Error, Result};
use crate::graph::{connected_components, Graph};
use crate::kmeans::{kmeans, KMeansOptions};
use crate::operators::{build_gl, build_rw_with, ZeroSliceRule};
use crate::partition::Partition;
use crate::spectral::{largest_eigenpairs, smallest_eigenpairs_sym, EigenOptions, EigenResult};
use crate::triangles::TriangleIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Mixed-order Laplacian.
    Gl,
    /// Mixed-order random walk.
    Rw,
    /// Random-walk spectral clustering on edges (`Rw` at `lambda = 1`).
    Shi,
    /// Normalized-Laplacian embedding with row normalization (`Gl` at
    /// `lambda = 1`).
    Ng,
    /// Motif spectral clustering on the triangle graph (`Gl` at `lambda = 0`).
    Msc,
    /// Simplified tensor spectral clustering (`Rw` at `lambda = 0`).
    Stsc,
}

/// The operator family a method runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Laplacian,
    RandomWalk,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Gl, Method::Rw, Method::Shi, Method::Ng, Method::Msc, Method::Stsc];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Gl => "gl",
            Method::Rw => "rw",
            Method::Shi => "shi",
            Method::Ng => "ng",
            Method::Msc => "msc",
            Method::Stsc => "stsc",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Method::Gl | Method::Ng | Method::Msc => Family::Laplacian,
            Method::Rw | Method::Shi | Method::Stsc => Family::RandomWalk,
        }
    }

    /// The mixing parameter baked into a baseline, if any.
    pub fn fixed_lambda(self) -> Option<f64> {
        match self {
            Method::Gl | Method::Rw => None,
            Method::Shi | Method::Ng => Some(1.0),
            Method::Msc | Method::Stsc => Some(0.0),
        }
    }

    /// `lambda`, unless the method fixes its own.
    pub fn effective_lambda(self, lambda: f64) -> f64 {
        self.fixed_lambda().unwrap_or(lambda)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let alias = match lower.as_str() {
            "mosc-gl" | "moscgl" => "gl",
            "mosc-rw" | "moscrw" => "rw",
            "sc-shi" => "shi",
            "sc-ng" => "ng",
            other => other,
        };
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == alias)
            .ok_or_else(|| Error::Domain(format!("unknown method {s:?}")))
    }
}

/// How a bi-partition is read off the spectrum: a sweep cut under a
/// criterion, or 2-means on the two-column embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Splitter {
    Sweep(CutCriterion),
    KMeans,
}

impl Splitter {
    pub fn tag(self) -> &'static str {
        match self {
            Splitter::Sweep(c) => c.tag(),
            Splitter::KMeans => "km",
        }
    }

    /// Every sweep criterion followed by k-means.
    pub fn all() -> Vec<Splitter> {
        CutCriterion::ALL.into_iter().map(Splitter::Sweep).chain([Splitter::KMeans]).collect()
    }
}

impl fmt::Display for Splitter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Splitter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "km" | "kmeans" | "k-means" => Ok(Splitter::KMeans),
            _ => s.parse().map(Splitter::Sweep),
        }
    }
}

impl From<Splitter> for String {
    fn from(s: Splitter) -> String {
        s.tag().to_string()
    }
}

impl TryFrom<String> for Splitter {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    pub eigen: EigenOptions,
    pub kmeans: KMeansOptions,
    pub zero_slice: ZeroSliceRule,
}

impl ClusterOptions {
    /// Default options with both the eigensolver and k-means seeded by `seed`.
    pub fn seeded(seed: u64) -> Self {
        let mut opts = ClusterOptions::default();
        opts.eigen.seed = seed;
        opts.kmeans.seed = seed;
        opts
    }
}

/// Summary of the eigensolve behind a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDiagnostics {
    pub values: Vec<f64>,
    pub imag: Vec<f64>,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub dense: bool,
    pub warnings: Vec<String>,
}

impl From<&EigenResult> for EigenDiagnostics {
    fn from(r: &EigenResult) -> Self {
        EigenDiagnostics {
            values: r.values.clone(),
            imag: r.imag.clone(),
            residuals: r.residuals.clone(),
            matvecs: r.matvecs,
            dense: r.dense,
            warnings: r.warnings.clone(),
        }
    }
}

/// A node ordering from the second eigenvector, shared by every sweep
/// criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOrder {
    pub method: Method,
    pub lambda: f64,
    /// Score of every node; `order` sorts these ascending.
    pub scores: Vec<f64>,
    pub order: Vec<usize>,
    pub eigen: Option<EigenDiagnostics>,
    /// Set when the operator graph is disconnected and the ordering groups
    /// its components instead of following an eigenvector.
    pub components: Option<usize>,
    /// Nodes with a zero row in the random-walk operator.
    pub zero_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRun {
    pub method: Method,
    pub lambda: f64,
    pub splitter: Splitter,
    pub partition: Partition,
    /// Value of the sweep criterion at the selected cut.
    pub criterion_value: Option<f64>,
    pub sweep: Option<SweepCurve>,
    pub eigen: Option<EigenDiagnostics>,
    pub kmeans_wcss: Option<f64>,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Ascending sort of `scores`, ties by node id.
pub fn argsort(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order
}

/// Connected components of `G_X`: those of `G` when edges carry weight,
/// otherwise those of the triangle graph.
pub fn mixed_components(graph: &Graph, triangles: &TriangleIndex, lambda: f64) -> (usize, Vec<usize>) {
    if lambda > 0.0 {
        graph.components()
    } else {
        connected_components(graph.n(), |u| triangles.wt().row(u).map(|(v, _)| v))
    }
}

/// Computes the sweep ordering of `method` at `lambda`.
pub fn spectral_order(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    lambda: f64,
    opts: &ClusterOptions,
) -> Result<SpectralOrder> {
    check_lambda(lambda)?;
    let lambda = method.effective_lambda(lambda);
    match method.family() {
        Family::Laplacian => {
            let (count, labels) = mixed_components(graph, triangles, lambda);
            if count > 1 {
                let scores: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
                return Ok(SpectralOrder {
                    method,
                    lambda,
                    order: argsort(&scores),
                    scores,
                    eigen: None,
                    components: Some(count),
                    zero_rows: Vec::new(),
                });
            }
            let op = build_gl(graph, triangles, lambda)?;
            let eig = smallest_eigenpairs_sym(&op.lx, 2, &opts.eigen)?;
            let scores: Vec<f64> = eig.vectors[1].iter().zip(&op.dx).map(|(v, d)| v / d.sqrt()).collect();
            Ok(SpectralOrder {
                method,
                lambda,
                order: argsort(&scores),
                scores,
                eigen: Some((&eig).into()),
                components: None,
                zero_rows: Vec::new(),
            })
        }
        Family::RandomWalk => {
            let op = build_rw_with(graph, triangles, lambda, opts.zero_slice)?;
            let eig = largest_eigenpairs(&op.h, 2, &opts.eigen)?;
            let scores = eig.vectors[1].clone();
            Ok(SpectralOrder {
                method,
                lambda,
                order: argsort(&scores),
                scores,
                eigen: Some((&eig).into()),
                components: None,
                zero_rows: op.zero_rows,
            })
        }
    }
}

/// Sweeps one ordering under each splitter. The cut criteria are evaluated
/// at the ordering's own mixing parameter.
pub fn split_order(
    graph: &Graph,
    triangles: &TriangleIndex,
    so: &SpectralOrder,
    splitters: &[Splitter],
    opts: &ClusterOptions,
) -> Result<Vec<Result<ClusterRun>>> {
    let ctx = CutContext::new(graph, triangles, so.lambda)?;
    let criteria: Vec<CutCriterion> = splitters
        .iter()
        .filter_map(|s| match s {
            Splitter::Sweep(c) => Some(*c),
            Splitter::KMeans => None,
        })
        .collect();
    let mut curves = sweep_all(&so.order, &criteria, &ctx)?.into_iter();
    let mut out = Vec::with_capacity(splitters.len());
    for &splitter in splitters {
        let run = match splitter {
            Splitter::Sweep(c) => curves.next().expect("one curve per criterion").and_then(|curve| {
                let mut notes = Vec::new();
                if let Some(count) = so.components {
                    let zero_cut = curve.best_value == 0.0 && c.improves(0.0, f64::MIN_POSITIVE);
                    if !zero_cut {
                        return Err(Error::Disconnected { components: count });
                    }
                    notes.push(format!("operator graph has {count} components; returned the component split"));
                }
                if !so.zero_rows.is_empty() {
                    notes.push(format!("{} node(s) have zero rows in the transition matrix", so.zero_rows.len()));
                }
                Ok(ClusterRun {
                    method: so.method,
                    lambda: so.lambda,
                    splitter,
                    partition: Partition::bipartition(&curve.best_set()),
                    criterion_value: Some(curve.best_value),
                    sweep: Some(curve),
                    eigen: so.eigen.clone(),
                    kmeans_wcss: None,
                    seed: opts.eigen.seed,
                    notes,
                })
            }),
            Splitter::KMeans => multiway(graph, triangles, so.method, so.lambda, 2, opts),
        };
        out.push(run);
    }
    Ok(out)
}

/// Bi-partition under a single splitter.
pub fn bipartition(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    lambda: f64,
    splitter: Splitter,
    opts: &ClusterOptions,
) -> Result<ClusterRun> {
    if splitter == Splitter::KMeans {
        return multiway(graph, triangles, method, lambda, 2, opts);
    }
    let so = spectral_order(graph, triangles, method, lambda, opts)?;
    split_order(graph, triangles, &so, &[splitter], opts)?.pop().expect("one run")
}

pub fn mosc_gl(g: &Graph, ti: &TriangleIndex, lambda: f64, c: CutCriterion, opts: &ClusterOptions) -> Result<ClusterRun> {
    bipartition(g, ti, Method::Gl, lambda, Splitter::Sweep(c), opts)
}

pub fn mosc_rw(g: &Graph, ti: &TriangleIndex, lambda: f64, c: CutCriterion, opts: &ClusterOptions) -> Result<ClusterRun> {
    bipartition(g, ti, Method::Rw, lambda, Splitter::Sweep(c), opts)
}

pub fn sc_shi(g: &Graph, ti: &TriangleIndex, c: CutCriterion, opts: &ClusterOptions) -> Result<ClusterRun> {
    bipartition(g, ti, Method::Shi, 1.0, Splitter::Sweep(c), opts)
}

pub fn msc(g: &Graph, ti: &TriangleIndex, c: CutCriterion, opts: &ClusterOptions) -> Result<ClusterRun> {
    bipartition(g, ti, Method::Msc, 0.0, Splitter::Sweep(c), opts)
}

pub fn stsc(g: &Graph, ti: &TriangleIndex, c: CutCriterion, opts: &ClusterOptions) -> Result<ClusterRun> {
    bipartition(g, ti, Method::Stsc, 0.0, Splitter::Sweep(c), opts)
}

pub fn sc_ng(g: &Graph, ti: &TriangleIndex, k: usize, opts: &ClusterOptions) -> Result<ClusterRun> {
    multiway(g, ti, Method::Ng, 1.0, k, opts)
}

/// Spectral embedding used by [`multiway`]: `k` smallest eigenvectors of
/// `L_X` with unit rows, or `k` largest eigenvectors of `H` as they are.
pub fn embedding(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    lambda: f64,
    k: usize,
    opts: &ClusterOptions,
) -> Result<(DMatrix<f64>, EigenResult)> {
    let lambda = method.effective_lambda(lambda);
    match method.family() {
        Family::Laplacian => {
            let op = build_gl(graph, triangles, lambda)?;
            let eig = smallest_eigenpairs_sym(&op.lx, k, &opts.eigen)?;
            let mut x = eig.matrix();
            for mut row in x.row_iter_mut() {
                let norm = row.norm();
                if norm > 0.0 {
                    row /= norm;
                }
            }
            Ok((x, eig))
        }
        Family::RandomWalk => {
            let op = build_rw_with(graph, triangles, lambda, opts.zero_slice)?;
            let eig = largest_eigenpairs(&op.h, k, &opts.eigen)?;
            Ok((eig.matrix(), eig))
        }
    }
}

/// `k`-way clustering by k-means on the spectral embedding.
pub fn multiway(
    graph: &Graph,
    triangles: &TriangleIndex,
    method: Method,
    lambda: f64,
    k: usize,
    opts: &ClusterOptions,
) -> Result<ClusterRun> {
    check_lambda(lambda)?;
    let n = graph.n();
    if k < 2 || k > n {
        return Err(Error::Domain(format!("k = {k} is outside 2..={n}")));
    }
    let lambda = method.effective_lambda(lambda);
    let (partition, eigen, wcss) = if k == n {
        (Partition::new((0..n).collect(), n)?, None, 0.0)
    } else {
        let (x, eig) = embedding(graph, triangles, method, lambda, k, opts)?;
        let km = kmeans(&x, k, &opts.kmeans)?;
        (Partition::new(km.labels, k)?, Some((&eig).into()), km.wcss)
    };
    Ok(ClusterRun {
        method,
        lambda,
        splitter: Splitter::KMeans,
        partition,
        criterion_value: None,
        sweep: None,
        eigen,
        kmeans_wcss: Some(wcss),
        seed: opts.kmeans.seed,
        notes: Vec::new(),
    })
}
