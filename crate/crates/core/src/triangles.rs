//! Triangle enumeration and the triangle adjacency matrix `W_T`.

use crate::graph::Graph;
use crate::sparse::SparseSymMatrix;

/// Every triangle of a graph plus the derived weighted graph `G_T`.
///
/// `wt(i, j)` is the number of triangles containing both `i` and `j`, so it is
/// nonzero only on edges of the source graph. `dt(i)` is the row sum of `wt`,
/// which is twice the number of triangles at `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleIndex {
    triangles: Vec<[u32; 3]>,
    wt: SparseSymMatrix,
    dt: Vec<f64>,
    incidence_offsets: Vec<usize>,
    incidence: Vec<u32>,
}

impl TriangleIndex {
    /// Assembles the index from an explicit triangle list over an `n`-node graph.
    /// Triples are normalized to ascending order and sorted.
    pub fn from_triangles(graph: &Graph, mut triangles: Vec<[u32; 3]>) -> TriangleIndex {
        for t in triangles.iter_mut() {
            t.sort_unstable();
        }
        triangles.sort_unstable();
        triangles.dedup();

        let n = graph.n();
        let offsets = graph.offsets();
        let mut counts = vec![0.0f64; offsets[n]];
        for t in &triangles {
            let [a, b, c] = t.map(|x| x as usize);
            for (u, v) in [(a, b), (a, c), (b, c)] {
                let uv = graph.edge_slot(u, v).expect("triangle edge missing from graph");
                let vu = graph.edge_slot(v, u).expect("triangle edge missing from graph");
                counts[uv] += 1.0;
                counts[vu] += 1.0;
            }
        }
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for u in 0..n {
            for (p, &v) in graph.neighbors(u).iter().enumerate() {
                let w = counts[offsets[u] + p];
                if w > 0.0 {
                    indices.push(v as usize);
                    data.push(w);
                }
            }
            indptr[u + 1] = indices.len();
        }
        let wt = SparseSymMatrix::from_csr_parts(n, indptr, indices, data);
        let dt = wt.csr().row_sums();

        let mut per_node = vec![0usize; n];
        for t in &triangles {
            for &v in t {
                per_node[v as usize] += 1;
            }
        }
        let mut incidence_offsets = vec![0; n + 1];
        for v in 0..n {
            incidence_offsets[v + 1] = incidence_offsets[v] + per_node[v];
        }
        let mut fill = incidence_offsets[..n].to_vec();
        let mut incidence = vec![0u32; incidence_offsets[n]];
        for (id, t) in triangles.iter().enumerate() {
            for &v in t {
                incidence[fill[v as usize]] = id as u32;
                fill[v as usize] += 1;
            }
        }
        TriangleIndex { triangles, wt, dt, incidence_offsets, incidence }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Triangles as ascending node triples, in lexicographic order.
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Triangle adjacency matrix `W_T`.
    pub fn wt(&self) -> &SparseSymMatrix {
        &self.wt
    }

    /// Diagonal of `D_T`.
    pub fn dt(&self) -> &[f64] {
        &self.dt
    }

    pub fn n(&self) -> usize {
        self.dt.len()
    }

    /// Ids (positions in [`Self::triangles`]) of the triangles containing `node`.
    pub fn incident(&self, node: usize) -> &[u32] {
        &self.incidence[self.incidence_offsets[node]..self.incidence_offsets[node + 1]]
    }

    /// Number of triangles with `node` as an endpoint.
    pub fn triangle_degree(&self, node: usize) -> usize {
        self.incidence_offsets[node + 1] - self.incidence_offsets[node]
    }

    /// Number of triangles lying entirely inside each cluster of `labels`.
    pub fn count_within(&self, labels: &[usize], k: usize) -> Vec<usize> {
        let mut counts = vec![0; k];
        for t in &self.triangles {
            let l = labels[t[0] as usize];
            if labels[t[1] as usize] == l && labels[t[2] as usize] == l {
                counts[l] += 1;
            }
        }
        counts
    }
}

/// Enumerates all triangles with the degree-ordered forward algorithm: every
/// edge is oriented from lower to higher `(degree, id)` rank and triangles are
/// found by intersecting out-neighborhoods, so each is reported once.
pub fn enumerate_triangles(graph: &Graph) -> TriangleIndex {
    let n = graph.n();
    let rank_key = |v: usize| (graph.degree(v), v);
    let mut out: Vec<Vec<u32>> = (0..n)
        .map(|u| graph.neighbors(u).iter().copied().filter(|&v| rank_key(v as usize) > rank_key(u)).collect())
        .collect();
    for list in out.iter_mut() {
        list.sort_unstable();
    }
    let mut triangles = Vec::new();
    for u in 0..n {
        let ou = &out[u];
        for &v in ou {
            let ov = &out[v as usize];
            let (mut i, mut j) = (0, 0);
            while i < ou.len() && j < ov.len() {
                match ou[i].cmp(&ov[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        triangles.push([u as u32, v, ou[i]]);
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    TriangleIndex::from_triangles(graph, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).unwrap()
    }

    /// O(n^3) scan over every node triple.
    fn brute_force(g: &Graph) -> Vec<[u32; 3]> {
        let n = g.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k) {
                        out.push([i as u32, j as u32, k as u32]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn k3_has_one_triangle() {
        let ti = enumerate_triangles(&complete(3));
        assert_eq!(ti.triangles(), &[[0, 1, 2]]);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(ti.wt().get(u, v), 1.0);
        }
    }

    #[test]
    fn four_cycle_is_triangle_free() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let ti = enumerate_triangles(&g);
        assert!(ti.is_empty());
        assert_eq!(ti.wt().csr().nnz(), 0);
        assert_eq!(ti.dt(), &[0.0; 4]);
    }

    #[test]
    fn k4_weights_and_degrees() {
        let g = complete(4);
        let ti = enumerate_triangles(&g);
        assert_eq!(ti.triangles(), brute_force(&g).as_slice());
        assert_eq!(ti.len(), 4);
        for (u, v) in g.edges() {
            assert_eq!(ti.wt().get(u, v), 2.0);
        }
        assert_eq!(ti.dt(), &[6.0; 4]);
        assert_eq!(ti.triangle_degree(0), 3);
    }

    #[test]
    fn count_within_clusters() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
        let ti = enumerate_triangles(&g);
        assert_eq!(ti.count_within(&[0, 0, 0, 1, 1, 1], 2), vec![1, 1]);
        assert_eq!(ti.count_within(&[0, 0, 1, 1, 1, 1], 2), vec![0, 1]);
    }
}
