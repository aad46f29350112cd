//! Mixed-order spectral clustering.
//!
//! Graphs are clustered with operators that blend edge structure with
//! triangle structure: a mixed-order normalized Laplacian ([`Method::Gl`])
//! and a mixed-order random walk ([`Method::Rw`]), plus the edge-only and
//! triangle-only baselines they reduce to. Bi-partitions are read off the
//! second eigenvector by a sweep cut under one of ten cut criteria;
//! multiway clusterings use k-means on the leading eigenvectors.
//!
//! ```
//! use mosc::{enumerate_triangles, mosc_gl, ClusterOptions, CutCriterion, Graph};
//!
//! let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
//! let ti = enumerate_triangles(&g);
//! let run = mosc_gl(&g, &ti, 0.5, CutCriterion::Con2, &ClusterOptions::default()).unwrap();
//! assert_eq!(run.partition.sizes(), vec![3, 3]);
//! ```

pub mod bench;
pub mod clustering;
pub mod cuts;
pub mod error;
pub mod extract;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod operators;
pub mod partition;
pub mod selection;
pub mod sparse;
pub mod spectral;
pub mod synthetic;
pub mod triangles;

pub use clustering::{
    bipartition, msc, mosc_gl, mosc_rw, multiway, sc_ng, sc_shi, spectral_order, stsc, ClusterOptions, ClusterRun,
    Method, Splitter,
};
pub use cuts::{criterion_value, sweep_cut, CutContext, CutCriterion, SweepCurve};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph};
pub use metrics::{epsilon_nodes, epsilon_structures, evaluate, nmi, ocut, EvalReport, OcutReport, Structure};
pub use operators::{build_gl, build_rw};
pub use partition::{NodeSet, Partition};
pub use selection::{auto_lambda_cut, auto_lambda_density, oracle_lambda, LambdaGrid, OracleMetric, Task};
pub use triangles::{enumerate_triangles, TriangleIndex};
