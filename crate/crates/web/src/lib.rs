//! Browser bindings: cluster a pasted edge list and scan the mixing
//! parameter against a ground truth. Every entry point returns JSON.

use mosc::clustering::{spectral_order, split_order};
use mosc::io::{partition_from_labels, read_labels};
use mosc::{enumerate_triangles, evaluate, load_edge_list, ClusterOptions, Graph, Method, Splitter, TriangleIndex};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const ZACHARY_EDGES: &str = include_str!("../../../data/zachary.txt");
const ZACHARY_TRUTH: &str = include_str!("../../../data/zachary.truth");

#[derive(Serialize)]
struct GraphView {
    ids: Vec<u64>,
    edges: Vec<(usize, usize)>,
    triangles: usize,
}

#[derive(Serialize)]
struct ClusterView {
    graph: GraphView,
    labels: Vec<usize>,
    order: Vec<usize>,
    curve: Vec<Option<f64>>,
    best_u: Option<usize>,
    criterion_value: Option<f64>,
    lambda: f64,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct ScanPoint {
    lambda: f64,
    criterion_value: Option<f64>,
    eps_n: Option<f64>,
    eps_t: Option<f64>,
    nmi: Option<f64>,
    error: Option<String>,
}

fn load(edges: &str) -> Result<(Graph, TriangleIndex), String> {
    let (g, _) = load_edge_list(edges.as_bytes()).map_err(|e| e.to_string())?;
    let ti = enumerate_triangles(&g);
    Ok((g, ti))
}

fn view(g: &Graph, ti: &TriangleIndex) -> GraphView {
    GraphView { ids: g.original_ids().to_vec(), edges: g.edges().collect(), triangles: ti.len() }
}

pub fn cluster_json(edges: &str, method: &str, lambda: f64, criterion: &str) -> Result<String, String> {
    let (g, ti) = load(edges)?;
    let method: Method = method.parse().map_err(|e: mosc::Error| e.to_string())?;
    let splitter: Splitter = criterion.parse().map_err(|e: mosc::Error| e.to_string())?;
    let opts = ClusterOptions::default();
    let so = spectral_order(&g, &ti, method, lambda, &opts).map_err(|e| e.to_string())?;
    let run = split_order(&g, &ti, &so, &[splitter], &opts)
        .and_then(|mut runs| runs.pop().expect("one run"))
        .map_err(|e| e.to_string())?;
    let (curve, best_u) = match &run.sweep {
        Some(s) => (s.values.clone(), Some(s.best_u)),
        None => (Vec::new(), None),
    };
    let out = ClusterView {
        graph: view(&g, &ti),
        labels: run.partition.labels().to_vec(),
        order: so.order,
        curve,
        best_u,
        criterion_value: run.criterion_value,
        lambda: run.lambda,
        notes: run.notes,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn lambda_scan_json(edges: &str, truth: &str, method: &str, criterion: &str, steps: usize) -> Result<String, String> {
    let (g, _) = load(edges)?;
    let labels = read_labels(truth.as_bytes()).map_err(|e| e.to_string())?;
    let g = g.with_nodes(labels.iter().map(|(id, _)| *id));
    let ti = enumerate_triangles(&g);
    let truth = partition_from_labels(&g, &labels).map_err(|e| e.to_string())?;
    let method: Method = method.parse().map_err(|e: mosc::Error| e.to_string())?;
    let splitter: Splitter = criterion.parse().map_err(|e: mosc::Error| e.to_string())?;
    let opts = ClusterOptions::default();
    let steps = steps.max(2);
    let points: Vec<ScanPoint> = (0..steps)
        .map(|i| {
            let lambda = i as f64 / (steps - 1) as f64;
            let run = spectral_order(&g, &ti, method, lambda, &opts)
                .and_then(|so| split_order(&g, &ti, &so, &[splitter], &opts)?.pop().expect("one run"));
            match run.and_then(|r| Ok((evaluate(&truth, &r.partition, &g, &ti)?, r))) {
                Ok((e, r)) => ScanPoint {
                    lambda,
                    criterion_value: r.criterion_value,
                    eps_n: Some(e.eps_n),
                    eps_t: Some(e.eps_t),
                    nmi: Some(e.nmi),
                    error: None,
                },
                Err(e) => ScanPoint {
                    lambda,
                    criterion_value: None,
                    eps_n: None,
                    eps_t: None,
                    nmi: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn cluster(edges: &str, method: &str, lambda: f64, criterion: &str) -> Result<String, JsValue> {
    cluster_json(edges, method, lambda, criterion).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lambda_scan(edges: &str, truth: &str, method: &str, criterion: &str, steps: usize) -> Result<String, JsValue> {
    lambda_scan_json(edges, truth, method, criterion, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sample_edges() -> String {
    ZACHARY_EDGES.to_string()
}

#[wasm_bindgen]
pub fn sample_truth() -> String {
    ZACHARY_TRUTH.to_string()
}
