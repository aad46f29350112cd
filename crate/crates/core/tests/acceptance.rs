//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Datasets are read from `data/` at the
//! workspace root, or from `$MOSC_DATA_DIR`.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use mosc::clustering::{spectral_order, split_order, Splitter};
use mosc::cuts::{cut2, cut_stats, vol2};
use mosc::extract::extract_paired_communities;
use mosc::io::{partition_from_labels, read_graph, read_labels_file};
use mosc::metrics::max_weight_assignment;
use mosc::operators::reduced_similarity;
use mosc::selection::{auto_lambda_cut, auto_lambda_density, LambdaGrid, Task};
use mosc::{
    enumerate_triangles, epsilon_structures, evaluate, ocut, ClusterOptions, ClusterRun, CutContext, CutCriterion,
    EvalReport, Graph, Method, Partition, Structure, TriangleIndex,
};
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Dataset {
    graph: Graph,
    triangles: TriangleIndex,
    truth: Partition,
}

fn data_dir() -> PathBuf {
    std::env::var_os("MOSC_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
        .canonicalize()
        .unwrap_or_else(|_| PathBuf::from("data"))
}

fn dataset(name: &str) -> Result<Dataset, String> {
    let dir = data_dir();
    let (edges, labels) = (dir.join(format!("{name}.txt")), dir.join(format!("{name}.truth")));
    for p in [&edges, &labels] {
        if !p.exists() {
            return Err(format!("dataset file {} not found", p.display()));
        }
    }
    let loaded = read_graph(&edges).map_err(|e| e.to_string())?;
    let labels = read_labels_file(&labels).map_err(|e| e.to_string())?;
    let graph = loaded.graph.with_nodes(labels.iter().map(|(id, _)| *id));
    let truth = partition_from_labels(&graph, &labels).map_err(|e| e.to_string())?;
    let triangles = enumerate_triangles(&graph);
    Ok(Dataset { graph, triangles, truth })
}

/// Best run by NMI, then by fewest mis-clustered nodes.
fn best_by_truth(d: &Dataset, runs: impl IntoIterator<Item = ClusterRun>) -> Option<(ClusterRun, EvalReport)> {
    runs.into_iter()
        .filter_map(|r| evaluate(&d.truth, &r.partition, &d.graph, &d.triangles).ok().map(|e| (r, e)))
        .max_by(|a, b| a.1.nmi.total_cmp(&b.1.nmi).then(b.1.eps_n.total_cmp(&a.1.eps_n)))
}

fn all_sweeps(d: &Dataset, method: Method, lambda: f64) -> Vec<ClusterRun> {
    let opts = ClusterOptions::default();
    let so = spectral_order(&d.graph, &d.triangles, method, lambda, &opts).expect("ordering");
    let splitters: Vec<Splitter> = CutCriterion::ALL.into_iter().map(Splitter::Sweep).collect();
    split_order(&d.graph, &d.triangles, &so, &splitters, &opts).expect("sweeps").into_iter().flatten().collect()
}

fn describe(r: &ClusterRun, e: &EvalReport) -> String {
    format!(
        "{} lambda={} via {}: eps_n={} eps_e={} eps_t={} nmi={:.4}",
        r.method, r.lambda, r.splitter, e.eps_n, e.eps_e, e.eps_t, e.nmi
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn zachary() -> Outcome {
    let d = match dataset("zachary") {
        Ok(d) => d,
        Err(e) => return outcome(false, e),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for method in [Method::Gl, Method::Rw] {
        let (best, took) = timed(|| best_by_truth(&d, all_sweeps(&d, method, 0.5)));
        let Some((r, e)) = best else { return outcome(false, format!("{method}: no run succeeded")) };
        let ok = e.eps_n == 1.0 && e.eps_e == 2.0 && e.eps_t == 1.0 && (e.nmi - 0.837).abs() <= 0.005;
        let fast = took < Duration::from_secs(1);
        pass &= ok && fast;
        parts.push(format!("{} in {:.4}s", describe(&r, &e), took.as_secs_f64()));
    }
    outcome(pass, parts.join("; "))
}

fn dolphin() -> Outcome {
    let d = match dataset("dolphins") {
        Ok(d) => d,
        Err(e) => return outcome(false, e),
    };
    let grid = LambdaGrid::default();
    let opts = ClusterOptions::default();
    let (best, took) = timed(|| {
        let runs = CutCriterion::ALL
            .into_iter()
            .filter_map(|c| auto_lambda_cut(&d.graph, &d.triangles, Method::Gl, c, &grid, &opts).ok())
            .map(|s| s.run);
        best_by_truth(&d, runs)
    });
    let Some((r, e)) = best else { return outcome(false, "no run succeeded") };
    let ok = e.nmi == 1.0 && e.eps_n == 0.0 && e.eps_e == 0.0 && e.eps_t == 0.0;
    outcome(ok && took < Duration::from_secs(1), format!("{} in {:.4}s", describe(&r, &e), took.as_secs_f64()))
}

fn multiway_auto(name: &str, k: usize, min_nmi: f64, max_eps_t: f64) -> Outcome {
    let d = match dataset(name) {
        Ok(d) => d,
        Err(e) => return outcome(false, e),
    };
    let (sel, took) = timed(|| {
        auto_lambda_density(&d.graph, &d.triangles, Method::Gl, Task::Multiway(k), &LambdaGrid::default(), &ClusterOptions::default())
    });
    let sel = match sel {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let e = evaluate(&d.truth, &sel.run.partition, &d.graph, &d.triangles).unwrap();
    let ok = e.nmi >= min_nmi && e.eps_t <= max_eps_t && took < Duration::from_secs(5);
    outcome(ok, format!("{} in {:.4}s", describe(&sel.run, &e), took.as_secs_f64()))
}

fn pblogs() -> Outcome {
    let d = match dataset("pblogs") {
        Ok(d) => d,
        Err(e) => {
            // timing on a synthetic graph of the same size is informative only
            let (g, _) = mosc::synthetic::planted_partition(&[745, 745], 0.024, 0.0021, 5);
            let ti = enumerate_triangles(&g);
            let (res, took) = timed(|| spectral_order(&g, &ti, Method::Rw, 0.5, &ClusterOptions::default()));
            let status = if res.is_ok() { "completed" } else { "failed" };
            return outcome(
                false,
                format!("{e}; a planted 1490-node graph with {} edges {status} MOSC-RW lambda=0.5 in {:.2}s", g.m(), took.as_secs_f64()),
            );
        }
    };
    let best = best_by_truth(&d, all_sweeps(&d, Method::Stsc, 0.0));
    let (rw, took) = timed(|| all_sweeps(&d, Method::Rw, 0.5));
    let Some((r, e)) = best else { return outcome(false, "no STSC run succeeded") };
    let ok = e.nmi >= 0.40 && !rw.is_empty() && took < Duration::from_secs(60);
    outcome(ok, format!("{}; MOSC-RW lambda=0.5 in {:.2}s", describe(&r, &e), took.as_secs_f64()))
}

fn cheeger() -> Outcome {
    let bad = cheeger_violations(200, 11);
    outcome(bad.is_empty(), format!("{} violations over 200 graphs x 5 lambdas{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()))
}

fn cut_identities() -> Outcome {
    let mut r = rng(11);
    let (mut checked, mut bad) = (0usize, 0usize);
    for case in 0..200 {
        let (g, ti) = mixed_connected(5 + case % 8, &mut r);
        for s in splits(g.n()) {
            let scan = triple_scan(&g, &s);
            checked += 1;
            if scan.cut3 != 0.5 * cut2(&s, ti.wt()) || scan.vol3 != 0.5 * vol2(&s, ti.wt()) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} violations over {checked} splits"))
}

fn ncut_identities() -> Outcome {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let (g, ti) = mixed_connected(5 + case % 8, &mut r);
        let ctx = CutContext::new(&g, &ti, 0.5).unwrap();
        for s in splits(g.n()) {
            let st = cut_stats(&s, &ctx);
            let scan = triple_scan(&g, &s);
            if let (Some(nc2), Some(na2)) = (st.value(CutCriterion::Ncut2, 0.5), st.value(CutCriterion::Nass2, 0.5)) {
                worst = worst.max((nc2 - (2.0 - na2)).abs());
            }
            let (v3, v3c) = (scan.vol3, scan.vol3_c);
            if let (Some(nc3), Some(na3)) = (st.value(CutCriterion::Ncut3, 0.5), st.value(CutCriterion::Nass3, 0.5)) {
                let rhs = 2.0 / 3.0 - na3 / 3.0 + ((v3c - scan.assoc3_c) / v3 + (v3 - scan.assoc3) / v3c) / 3.0;
                worst = worst.max((nc3 - rhs).abs());
            }
        }
    }
    let g = Graph::from_edges(
        8,
        [(0, 1), (0, 5), (0, 6), (1, 3), (1, 4), (1, 6), (1, 7), (2, 3), (2, 5), (3, 6), (4, 7), (5, 6)],
    )
    .unwrap();
    let ti = enumerate_triangles(&g);
    let ctx = CutContext::new(&g, &ti, 0.5).unwrap();
    let mut argmin: Option<(f64, f64)> = None;
    let mut max_nass3 = f64::NEG_INFINITY;
    for s in splits(8) {
        let st = cut_stats(&s, &ctx);
        if let (Some(nc), Some(na)) = (st.value(CutCriterion::Ncut3, 0.5), st.value(CutCriterion::Nass3, 0.5)) {
            if argmin.is_none_or(|(v, _)| nc < v) {
                argmin = Some((nc, na));
            }
            max_nass3 = max_nass3.max(na);
        }
    }
    let at_min = argmin.unwrap().1;
    let differs = at_min < max_nass3 - 1e-9;
    outcome(
        worst <= 1e-12 && differs,
        format!("max deviation {worst:.2e}; fixture Nassoc3 at the Ncut3 minimizer {at_min:.4} vs maximum {max_nass3:.4}"),
    )
}

fn metric_oracles() -> Outcome {
    let mut r = rng(3);
    let mut bad = 0;
    for _ in 0..100 {
        let n = r.gen_range(6..16);
        let g = gnp(n, 0.5, &mut r);
        let ti = enumerate_triangles(&g);
        let truth = random_partition(n, r.gen_range(1..=6), &mut r);
        let cand = random_partition(n, r.gen_range(1..=6), &mut r);
        for s in [Structure::Node, Structure::Edge, Structure::Triangle] {
            let fast = epsilon_structures(&truth, &cand, s, &g, &ti).unwrap().value;
            bad += usize::from(fast != brute_epsilon(&truth, &cand, &structures(&g, &ti, s)));
        }
        let k = r.gen_range(1..=6);
        let w: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| r.gen_range(0..20) as f64).collect()).collect();
        let brute = permutations(k).iter().map(|p| (0..k).map(|i| w[i][p[i]]).sum::<f64>()).fold(f64::MIN, f64::max);
        bad += usize::from(max_weight_assignment(&w).0 != brute);
    }
    let mut ocut_bad = 0;
    for _ in 0..100 {
        let n = r.gen_range(4..14);
        let g = gnp(n, 0.55, &mut r);
        let ti = enumerate_triangles(&g);
        let truth = random_partition(n, 2, &mut r);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        for s in [Structure::Node, Structure::Edge, Structure::Triangle] {
            let items = structures(&g, &ti, s);
            let brute = (1..n)
                .map(|u| {
                    let mut labels = vec![1; n];
                    order[..u].iter().for_each(|&v| labels[v] = 0);
                    brute_epsilon(&truth, &Partition::new(labels, 2).unwrap(), &items)
                })
                .fold(f64::INFINITY, f64::min);
            ocut_bad += usize::from(ocut(&order, &truth, s, &g, &ti).unwrap().value != brute);
        }
    }
    outcome(bad + ocut_bad == 0, format!("{bad} assignment mismatches over 100 pairs; {ocut_bad} Ocut mismatches over 100 orderings"))
}

fn tensor_oracle() -> Outcome {
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = 3 + case % 8;
        let g = gnp(n, 0.3 + 0.6 * (case as f64 / 50.0), &mut r);
        let fast = reduced_similarity(&enumerate_triangles(&g), n).to_dense();
        worst = worst.max((fast - tensor_similarity(&g)).abs().max());
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e} over 50 graphs"))
}

fn extraction_smoke() -> Outcome {
    let sizes = vec![25; 40];
    let (g, truth) = mosc::synthetic::planted_partition(&sizes, 0.4, 0.004, 21);
    let mut comms: Vec<Vec<u64>> = truth.clusters().into_iter().map(|c| c.into_iter().map(|v| v as u64).collect()).collect();
    // overlapping communities straddling neighbouring blocks
    for b in 0..10 {
        comms.push((b * 25 + 15..b * 25 + 35).map(|v| v as u64).collect());
    }
    let a = extract_paired_communities(&g, &comms, 30, 30).unwrap();
    let b = extract_paired_communities(&g, &comms, 30, 30).unwrap();
    let same = a.pairs.len() == b.pairs.len()
        && a.pairs.iter().zip(&b.pairs).all(|(x, y)| x.provenance == y.provenance && x.truth == y.truth);
    let ok = same && !a.pairs.is_empty() && a.pairs.iter().all(|p| p.truth.k() == 2);
    outcome(ok, format!("{} pairs, {} skipped, identical on rerun: {same}", a.pairs.len(), a.skipped.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Zachary MOSC-GL/RW at lambda 0.5", zachary),
        ("Dolphin MOSC-GL auto lambda", dolphin),
        ("Football k=12 MOSC-GL auto lambda", || multiway_auto("football", 12, 0.92, 2.0)),
        ("Polbooks k=3 MOSC-GL auto lambda", || multiway_auto("polbooks", 3, 0.58, 2.0)),
        ("PBlogs STSC and MOSC-RW runtime", pblogs),
        ("mixed-order Cheeger bound", cheeger),
        ("triangle cut and volume identities", cut_identities),
        ("normalized cut/association identities", ncut_identities),
        ("error metric and Ocut oracles", metric_oracles),
        ("reduced similarity tensor oracle", tensor_oracle),
        ("paired-community extraction smoke run", extraction_smoke),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let o = check();
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: criteria {failed:?} failed");
        std::process::exit(1);
    }
}
