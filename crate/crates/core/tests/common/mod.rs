#![allow(dead_code)]

use mosc::cuts::cut_stats;
use mosc::{enumerate_triangles, mosc_gl, ClusterOptions, CutContext, CutCriterion, Graph, NodeSet, Partition, Structure, TriangleIndex};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

/// Two triangles joined by the edge 2-3.
pub fn barbell() -> Graph {
    Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
}

pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Connected graph whose triangle graph is also connected and covers every
/// node, so every mixing parameter gives a connected `G_X`.
pub fn mixed_connected(n: usize, rng: &mut impl Rng) -> (Graph, TriangleIndex) {
    loop {
        let p = rng.gen_range(0.35..0.9);
        let g = gnp(n, p, rng);
        if g.components().0 != 1 {
            continue;
        }
        let ti = enumerate_triangles(&g);
        let (count, _) = mosc::clustering::mixed_components(&g, &ti, 0.0);
        if count == 1 && (0..n).all(|v| ti.triangle_degree(v) > 0) {
            return (g, ti);
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, 0.0..1.0f64, any::<u64>()).prop_map(|(n, p, seed)| gnp(n, p, &mut rng(seed)))
}

pub fn arb_connected(min_n: usize, max_n: usize) -> impl Strategy<Value = (Graph, TriangleIndex)> {
    (min_n..=max_n, any::<u64>()).prop_map(|(n, seed)| mixed_connected(n, &mut rng(seed)))
}

/// Triangle statistics of `s` from a scan over every node triple.
pub struct TripleScan {
    pub cut3: f64,
    pub vol3: f64,
    pub vol3_c: f64,
    pub assoc3: f64,
    pub assoc3_c: f64,
}

pub fn triple_scan(g: &Graph, s: &NodeSet) -> TripleScan {
    let n = g.n();
    let mut r = TripleScan { cut3: 0.0, vol3: 0.0, vol3_c: 0.0, assoc3: 0.0, assoc3_c: 0.0 };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !(g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k)) {
                    continue;
                }
                let inside = [i, j, k].iter().filter(|&&v| s.contains(v)).count() as f64;
                r.vol3 += inside;
                r.vol3_c += 3.0 - inside;
                match inside as usize {
                    3 => r.assoc3 += 3.0,
                    0 => r.assoc3_c += 3.0,
                    _ => r.cut3 += 1.0,
                }
            }
        }
    }
    r
}

/// Every proper subset containing node 0, so each split is seen once.
pub fn splits(n: usize) -> impl Iterator<Item = NodeSet> {
    (0..1u64 << (n - 1)).map(|b| (b << 1) | 1).filter(move |&b| b != (1 << n) - 1).map(move |b| NodeSet::from_bits(n, b))
}

/// `T(i, j, k) = 1` when `{i, j, k}` is a triangle, materialized in full.
pub fn adjacency_tensor(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut t = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k && g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k) {
                    t[(i * n + j) * n + k] = 1.0;
                }
            }
        }
    }
    t
}

/// Transition tensor normalized over `j`, slices with zero sum left at zero,
/// then averaged over `k`.
pub fn tensor_similarity(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let t = adjacency_tensor(g);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let sum: f64 = (0..n).map(|j| t[(i * n + j) * n + k]).sum();
            if sum == 0.0 {
                continue;
            }
            for j in 0..n {
                a[(i, j)] += t[(i * n + j) * n + k] / sum / n as f64;
            }
        }
    }
    a
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

pub fn structures(g: &Graph, ti: &TriangleIndex, s: Structure) -> Vec<Vec<usize>> {
    match s {
        Structure::Node => (0..g.n()).map(|v| vec![v]).collect(),
        Structure::Edge => g.edges().map(|(u, v)| vec![u, v]).collect(),
        Structure::Triangle => ti.triangles().iter().map(|t| t.iter().map(|&x| x as usize).collect()).collect(),
    }
}

/// Smallest count of truth-internal structures not kept whole by the
/// candidate cluster matched to their truth cluster, over every matching.
pub fn brute_epsilon(truth: &Partition, cand: &Partition, items: &[Vec<usize>]) -> f64 {
    let k = truth.k().max(cand.k());
    let (t, c) = (truth.labels(), cand.labels());
    let internal: Vec<&Vec<usize>> = items.iter().filter(|s| s.iter().all(|&v| t[v] == t[s[0]])).collect();
    permutations(k)
        .iter()
        .map(|sigma| internal.iter().filter(|s| !s.iter().all(|&v| c[v] == sigma[t[s[0]]])).count())
        .min()
        .unwrap() as f64
}

pub fn random_partition(n: usize, k: usize, r: &mut impl Rng) -> Partition {
    use rand::seq::SliceRandom;
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.gen_range(0..k) }).collect();
    labels.shuffle(r);
    Partition::new(labels, k).unwrap()
}

/// Smallest mixed conductance over all splits.
pub fn brute_phi_x(g: &Graph, ti: &TriangleIndex, lambda: f64) -> f64 {
    let ctx = CutContext::new(g, ti, lambda).unwrap();
    splits(g.n())
        .filter_map(|s| cut_stats(&s, &ctx).value(CutCriterion::Conx, lambda))
        .fold(f64::INFINITY, f64::min)
}

/// Graphs and mixing parameters where the congx sweep misses the mixed
/// Cheeger bound `2 sqrt(2 phi*)`.
pub fn cheeger_violations(cases: usize, seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let opts = ClusterOptions::default();
    let mut bad = Vec::new();
    for case in 0..cases {
        let (g, ti) = mixed_connected(5 + case % 8, &mut r);
        for lambda in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let run = mosc_gl(&g, &ti, lambda, CutCriterion::Congx, &opts).unwrap();
            let ctx = CutContext::new(&g, &ti, lambda).unwrap();
            let found = cut_stats(&run.partition.cluster_set(0), &ctx).value(CutCriterion::Conx, lambda).unwrap();
            let best = brute_phi_x(&g, &ti, lambda);
            if found > 2.0 * (2.0 * best).sqrt() + 1e-12 {
                bad.push(format!("case {case} lambda {lambda}: {found} > 2 sqrt(2 * {best})"));
            }
        }
    }
    bad
}
