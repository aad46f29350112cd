//! Clustering error against a ground truth: mis-clustered nodes, edges and
//! triangles under the best cluster matching, normalized mutual
//! information, and the best-prefix error of an ordering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::triangles::TriangleIndex;

/// What an error count is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    #[serde(alias = "n")]
    Node,
    #[serde(alias = "e")]
    Edge,
    #[serde(alias = "t")]
    Triangle,
}

impl Structure {
    pub fn tag(self) -> &'static str {
        match self {
            Structure::Node => "n",
            Structure::Edge => "e",
            Structure::Triangle => "t",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "node" | "nodes" => Ok(Structure::Node),
            "e" | "edge" | "edges" => Ok(Structure::Edge),
            "t" | "triangle" | "triangles" => Ok(Structure::Triangle),
            _ => Err(Error::Domain(format!("unknown metric {s:?}; expected n, e or t"))),
        }
    }
}

/// Maximum-weight perfect matching of rows to columns of a square matrix
/// (Hungarian method with potentials, `O(k^3)`). Returns the total weight
/// and the column matched to each row.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let k = weights.len();
    if k == 0 {
        return (0.0, Vec::new());
    }
    // 1-based arrays; column 0 is a sentinel
    let cost = |i: usize, j: usize| -weights[i - 1][j - 1];
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut matched = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        matched[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; k];
    for j in 1..=k {
        assignment[matched[j] - 1] = j - 1;
    }
    let total = assignment.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    (total, assignment)
}

/// `counts[c][d]`: structures lying entirely inside truth cluster `c` and
/// candidate cluster `d`, padded to a square `max(k*, k)` matrix. The
/// second value is the number of structures inside truth clusters.
fn overlap_counts(
    truth: &Partition,
    cand: &Partition,
    structure: Structure,
    graph: Option<&Graph>,
    triangles: Option<&TriangleIndex>,
) -> Result<(Vec<Vec<f64>>, f64)> {
    if truth.n() != cand.n() {
        return Err(Error::Domain(format!("partitions cover {} and {} nodes", truth.n(), cand.n())));
    }
    let k = truth.k().max(cand.k());
    let mut counts = vec![vec![0.0; k]; k];
    let mut total = 0.0;
    let (t, c) = (truth.labels(), cand.labels());
    let mut tally = |nodes: &[usize]| {
        let tc = t[nodes[0]];
        if nodes.iter().all(|&v| t[v] == tc) {
            total += 1.0;
            let cc = c[nodes[0]];
            if nodes.iter().all(|&v| c[v] == cc) {
                counts[tc][cc] += 1.0;
            }
        }
    };
    match structure {
        Structure::Node => (0..truth.n()).for_each(|v| tally(&[v])),
        Structure::Edge => {
            let g = graph.ok_or_else(|| Error::Domain("edge errors need the graph".into()))?;
            check_size(g.n(), truth.n())?;
            g.edges().for_each(|(u, v)| tally(&[u, v]));
        }
        Structure::Triangle => {
            let ti = triangles.ok_or_else(|| Error::Domain("triangle errors need the triangle index".into()))?;
            check_size(ti.n(), truth.n())?;
            for tri in ti.triangles() {
                tally(&tri.map(|x| x as usize));
            }
        }
    }
    Ok((counts, total))
}

fn check_size(graph_n: usize, n: usize) -> Result<()> {
    if graph_n != n {
        return Err(Error::Domain(format!("graph has {graph_n} nodes but the partitions cover {n}")));
    }
    Ok(())
}

/// An error count together with the matching that achieves it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matched {
    pub value: f64,
    /// Candidate cluster matched to each truth cluster (indices at or above
    /// a partition's `k` are padding).
    pub assignment: Vec<usize>,
}

/// Mis-clustered nodes: `n` minus the largest total overlap under a
/// one-to-one matching of truth clusters to candidate clusters, i.e. half
/// the summed symmetric differences of matched clusters.
pub fn epsilon_nodes(truth: &Partition, cand: &Partition) -> Result<Matched> {
    epsilon(truth, cand, Structure::Node, None, None)
}

/// Structures inside truth clusters that no matched candidate cluster keeps
/// intact.
pub fn epsilon_structures(
    truth: &Partition,
    cand: &Partition,
    structure: Structure,
    graph: &Graph,
    triangles: &TriangleIndex,
) -> Result<Matched> {
    epsilon(truth, cand, structure, Some(graph), Some(triangles))
}

fn epsilon(
    truth: &Partition,
    cand: &Partition,
    structure: Structure,
    graph: Option<&Graph>,
    triangles: Option<&TriangleIndex>,
) -> Result<Matched> {
    let (counts, total) = overlap_counts(truth, cand, structure, graph, triangles)?;
    let (kept, mut assignment) = max_weight_assignment(&counts);
    assignment.truncate(truth.k());
    Ok(Matched { value: total - kept, assignment })
}

/// Normalized mutual information `2 I / (H(truth) + H(cand))`, natural log.
pub fn nmi(truth: &Partition, cand: &Partition) -> Result<f64> {
    let n = truth.n();
    if n != cand.n() {
        return Err(Error::Domain(format!("partitions cover {} and {} nodes", n, cand.n())));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut joint = vec![vec![0usize; cand.k()]; truth.k()];
    for (&a, &b) in truth.labels().iter().zip(cand.labels()) {
        joint[a][b] += 1;
    }
    let nf = n as f64;
    let entropy = |sizes: &[usize]| -> f64 {
        sizes.iter().filter(|&&s| s > 0).map(|&s| s as f64 / nf).map(|p| -p * p.ln()).sum()
    };
    let (ta, cb) = (truth.sizes(), cand.sizes());
    let (ha, hb) = (entropy(&ta), entropy(&cb));
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut info = 0.0;
    for (a, row) in joint.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if c > 0 {
                let pab = c as f64 / nf;
                info += pab * (pab * nf * nf / (ta[a] as f64 * cb[b] as f64)).ln();
            }
        }
    }
    Ok((2.0 * info / (ha + hb)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub eps_n: f64,
    pub eps_e: f64,
    pub eps_t: f64,
    pub nmi: f64,
    pub assignment_n: Vec<usize>,
    pub assignment_e: Vec<usize>,
    pub assignment_t: Vec<usize>,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "eps_n,eps_e,eps_t,nmi";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.eps_n, self.eps_e, self.eps_t, self.nmi)
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", Self::CSV_HEADER, self.csv_row())
    }
}

/// All four metrics, each matching optimized independently.
pub fn evaluate(truth: &Partition, cand: &Partition, graph: &Graph, triangles: &TriangleIndex) -> Result<EvalReport> {
    let n = epsilon_nodes(truth, cand)?;
    let e = epsilon_structures(truth, cand, Structure::Edge, graph, triangles)?;
    let t = epsilon_structures(truth, cand, Structure::Triangle, graph, triangles)?;
    Ok(EvalReport {
        eps_n: n.value,
        eps_e: e.value,
        eps_t: t.value,
        nmi: nmi(truth, cand)?,
        assignment_n: n.assignment,
        assignment_e: e.assignment,
        assignment_t: t.assignment,
    })
}

/// Error of every prefix split of an ordering and the smallest one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcutReport {
    pub metric: Structure,
    pub best_u: usize,
    pub value: f64,
    /// `curve[u - 1]` is the error of `{order[..u], rest}`.
    pub curve: Vec<f64>,
}

impl OcutReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("u,eps_{}\n", self.metric);
        for (i, v) in self.curve.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, v));
        }
        out
    }
}

/// Smallest error over all prefix splits `{order[..u], rest}`, `u = 1..n-1`,
/// updated incrementally along the ordering. Ties go to the smallest `u`.
pub fn ocut(
    order: &[usize],
    truth: &Partition,
    metric: Structure,
    graph: &Graph,
    triangles: &TriangleIndex,
) -> Result<OcutReport> {
    let n = truth.n();
    if order.len() != n || n < 2 {
        return Err(Error::Domain(format!("order of length {} does not cover {n} nodes", order.len())));
    }
    if metric != Structure::Node {
        check_size(graph.n(), n)?;
    }
    let t = truth.labels();
    let k = truth.k().max(2);
    // all nodes start on side 1
    let start = Partition::new(vec![0; n], 1)?;
    let (mut counts, total) = {
        let (c, total) = overlap_counts(truth, &start, metric, Some(graph), Some(triangles))?;
        let mut padded = vec![vec![0.0; k]; k];
        for (i, row) in c.iter().enumerate() {
            padded[i][1] = row[0];
        }
        (padded, total)
    };
    let mut in_s = vec![false; n];
    let mut curve = Vec::with_capacity(n - 1);
    for &v in &order[..n - 1] {
        let c = t[v];
        match metric {
            Structure::Node => {
                counts[c][1] -= 1.0;
                counts[c][0] += 1.0;
            }
            Structure::Edge => {
                for &u in graph.neighbors(v) {
                    let u = u as usize;
                    if t[u] == c {
                        if in_s[u] {
                            counts[c][0] += 1.0;
                        } else {
                            counts[c][1] -= 1.0;
                        }
                    }
                }
            }
            Structure::Triangle => {
                for &id in triangles.incident(v) {
                    let tri = triangles.triangles()[id as usize];
                    if tri.iter().any(|&x| t[x as usize] != c) {
                        continue;
                    }
                    match tri.iter().filter(|&&x| x as usize != v && in_s[x as usize]).count() {
                        0 => counts[c][1] -= 1.0,
                        2 => counts[c][0] += 1.0,
                        _ => {}
                    }
                }
            }
        }
        in_s[v] = true;
        curve.push(total - max_weight_assignment(&counts).0);
    }
    let (mut best_u, mut value) = (1, curve[0]);
    for (i, &e) in curve.iter().enumerate() {
        if e < value {
            best_u = i + 1;
            value = e;
        }
    }
    Ok(OcutReport { metric, best_u, value, curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangles::enumerate_triangles;

    fn part(labels: &[usize]) -> Partition {
        Partition::from_labels(labels)
    }

    #[test]
    fn identical_partitions() {
        let a = part(&[0, 0, 1, 1, 2]);
        assert_eq!(epsilon_nodes(&a, &a).unwrap().value, 0.0);
        assert_eq!(nmi(&a, &a).unwrap(), 1.0);
        assert_eq!(nmi(&part(&[0, 0]), &part(&[0, 0])).unwrap(), 1.0);
    }

    #[test]
    fn one_misplaced_node() {
        let truth = part(&[0, 0, 1, 1]);
        let cand = part(&[0, 0, 0, 1]);
        assert_eq!(epsilon_nodes(&truth, &cand).unwrap().value, 1.0);
        // relabeling the candidate changes nothing
        let swapped = Partition::new(vec![1, 1, 1, 0], 2).unwrap();
        assert_eq!(epsilon_nodes(&truth, &swapped).unwrap().value, 1.0);
    }

    #[test]
    fn split_triangle() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let ti = enumerate_triangles(&g);
        let truth = part(&[0, 0, 0, 1]);
        let cand = part(&[0, 0, 1, 1]);
        assert_eq!(epsilon_structures(&truth, &cand, Structure::Triangle, &g, &ti).unwrap().value, 1.0);
        assert_eq!(epsilon_structures(&truth, &cand, Structure::Edge, &g, &ti).unwrap().value, 2.0);
    }

    #[test]
    fn assignment_small() {
        let w = vec![vec![1.0, 5.0, 0.0], vec![4.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]];
        assert_eq!(max_weight_assignment(&w), (11.0, vec![1, 0, 2]));
    }

    #[test]
    fn ocut_perfect_orders() {
        let n = 6;
        let g = Graph::from_edges(n, [(0, 1), (2, 3), (4, 5)]).unwrap();
        let ti = enumerate_triangles(&g);
        let truth = part(&[0, 0, 0, 1, 1, 1]);
        let r = ocut(&[0, 1, 2, 3, 4, 5], &truth, Structure::Node, &g, &ti).unwrap();
        assert_eq!((r.best_u, r.value), (3, 0.0));
        let r = ocut(&[5, 4, 3, 2, 1, 0], &truth, Structure::Node, &g, &ti).unwrap();
        assert_eq!(r.value, 0.0);
        let r = ocut(&[0, 3, 1, 4, 2, 5], &truth, Structure::Edge, &g, &ti).unwrap();
        assert_eq!(r.curve.len(), 5);
    }
}
