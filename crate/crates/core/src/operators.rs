//! Spectral operators: normalized Laplacians, the mixed-order Laplacian
//! `L_X`, the transition matrix `P`, the reduced triangle similarity `A` and
//! the mixed similarity `H`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_lambda, Error, Result};
use crate::graph::Graph;
use crate::sparse::{degree_vector, CsrMatrix, SparseSymMatrix};
use crate::triangles::TriangleIndex;

/// `D^{-1/2} (D - W) D^{-1/2}` for a symmetric nonnegative `w`.
pub fn normalized_laplacian(w: &SparseSymMatrix) -> Result<SparseSymMatrix> {
    let d = degree_vector(w);
    let inv_sqrt = inverse_sqrt(&d)?;
    let n = w.dim();
    let mut triplets = Vec::with_capacity(w.csr().nnz() + n);
    for i in 0..n {
        triplets.push((i, i, 1.0));
        for (j, v) in w.row(i) {
            triplets.push((i, j, -v * inv_sqrt[i] * inv_sqrt[j]));
        }
    }
    Ok(SparseSymMatrix::new(CsrMatrix::from_triplets(n, triplets)).expect("congruence keeps symmetry"))
}

fn inverse_sqrt(d: &[f64]) -> Result<Vec<f64>> {
    d.iter()
        .enumerate()
        .map(|(node, &v)| if v > 0.0 { Ok(1.0 / v.sqrt()) } else { Err(Error::IsolatedNode { node }) })
        .collect()
}

/// The mixed-order graph `G_X` and its normalized Laplacian.
#[derive(Debug, Clone)]
pub struct MixedOperatorGL {
    pub lambda: f64,
    /// `W_X = (1 - lambda) W_T + lambda W`
    pub wx: SparseSymMatrix,
    /// Diagonal of `D_X`.
    pub dx: Vec<f64>,
    /// `L_X = D_X^{-1/2} (D_X - W_X) D_X^{-1/2}`
    pub lx: SparseSymMatrix,
}

/// Mixed-order adjacency `(1 - lambda) W_T + lambda W`, without the Laplacian.
pub fn mixed_adjacency(graph: &Graph, triangles: &TriangleIndex, lambda: f64) -> Result<SparseSymMatrix> {
    check_lambda(lambda)?;
    Ok(triangles.wt().linear_combination(1.0 - lambda, &graph.adjacency(), lambda))
}

pub fn build_gl(graph: &Graph, triangles: &TriangleIndex, lambda: f64) -> Result<MixedOperatorGL> {
    let wx = mixed_adjacency(graph, triangles, lambda)?;
    let dx = degree_vector(&wx);
    let lx = normalized_laplacian(&wx)?;
    Ok(MixedOperatorGL { lambda, wx, dx, lx })
}

/// Random-walk transition matrix `P = D^{-1} W`.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub p: CsrMatrix,
    /// Nodes without neighbors; their rows of `P` are zero.
    pub zero_rows: Vec<usize>,
}

pub fn transition_matrix(graph: &Graph) -> TransitionMatrix {
    let n = graph.n();
    let mut indptr = vec![0; n + 1];
    let mut indices = Vec::with_capacity(2 * graph.m());
    let mut data = Vec::with_capacity(2 * graph.m());
    let mut zero_rows = Vec::new();
    for u in 0..n {
        let deg = graph.degree(u);
        if deg == 0 {
            zero_rows.push(u);
        }
        for &v in graph.neighbors(u) {
            indices.push(v as usize);
            data.push(1.0 / deg as f64);
        }
        indptr[u + 1] = indices.len();
    }
    TransitionMatrix { p: CsrMatrix::from_csr_parts(n, indptr, indices, data), zero_rows }
}

/// How a slice `P(i, :, k)` of the transition tensor is filled when `i` and
/// `k` share no triangle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSliceRule {
    /// The slice stays zero.
    #[default]
    Zero,
    /// The slice is uniform `1/n` over every target.
    Uniform,
}

/// A square matrix stored as a sparse part plus a constant fill per row:
/// `M(i, j) = sparse(i, j) + row_fill[i]` for every `j`.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub sparse: CsrMatrix,
    pub row_fill: Option<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn dim(&self) -> usize {
        self.sparse.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sparse.get(i, j) + self.row_fill.as_ref().map_or(0.0, |f| f[i])
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        let mut sums = self.sparse.row_sums();
        if let Some(fill) = &self.row_fill {
            for (s, f) in sums.iter_mut().zip(fill) {
                *s += f * n;
            }
        }
        sums
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        self.sparse.matvec(x, y);
        if let Some(fill) = &self.row_fill {
            let total: f64 = x.iter().sum();
            for (out, f) in y.iter_mut().zip(fill) {
                *out += f * total;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.row_fill {
            None => self.sparse.frobenius_norm(),
            Some(_) => self.to_dense().norm(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = self.sparse.to_dense();
        if let Some(fill) = &self.row_fill {
            for (i, f) in fill.iter().enumerate() {
                for j in 0..self.dim() {
                    m[(i, j)] += f;
                }
            }
        }
        m
    }

    fn mixed(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> SimilarityMatrix {
        let row_fill = match &self.row_fill {
            Some(fill) if alpha != 0.0 => Some(fill.iter().map(|f| alpha * f).collect()),
            _ => None,
        };
        SimilarityMatrix { sparse: self.sparse.linear_combination(alpha, other, beta), row_fill }
    }
}

/// Averages the slices of the triangle transition tensor:
/// `A(i, j) = (1/n) * sum over k with {i, j, k} a triangle of 1 / W_T(i, k)`.
/// Empty slices contribute nothing.
pub fn reduced_similarity(triangles: &TriangleIndex, n: usize) -> SimilarityMatrix {
    reduced_similarity_with(triangles, n, ZeroSliceRule::Zero)
}

pub fn reduced_similarity_with(triangles: &TriangleIndex, n: usize, rule: ZeroSliceRule) -> SimilarityMatrix {
    let wt = triangles.wt();
    let inv_n = 1.0 / n as f64;
    let mut triplets = Vec::with_capacity(6 * triangles.len());
    for t in triangles.triangles() {
        let [a, b, c] = t.map(|x| x as usize);
        for (i, j, k) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            triplets.push((i, j, inv_n / wt.get(i, k)));
        }
    }
    let sparse = CsrMatrix::from_triplets(n, triplets);
    let row_fill = match rule {
        ZeroSliceRule::Zero => None,
        ZeroSliceRule::Uniform => Some(
            (0..n)
                .map(|i| {
                    let empty_slices = n - wt.row(i).count();
                    empty_slices as f64 * inv_n * inv_n
                })
                .collect(),
        ),
    };
    SimilarityMatrix { sparse, row_fill }
}

/// Operators of the random-walk formulation.
#[derive(Debug, Clone)]
pub struct MixedOperatorRW {
    pub lambda: f64,
    pub p: CsrMatrix,
    pub a: SimilarityMatrix,
    /// `H = (1 - lambda) A + lambda P`, not renormalized.
    pub h: SimilarityMatrix,
    /// Nodes with a zero row in `P`.
    pub zero_rows: Vec<usize>,
}

pub fn build_rw(graph: &Graph, triangles: &TriangleIndex, lambda: f64) -> Result<MixedOperatorRW> {
    build_rw_with(graph, triangles, lambda, ZeroSliceRule::Zero)
}

pub fn build_rw_with(
    graph: &Graph,
    triangles: &TriangleIndex,
    lambda: f64,
    rule: ZeroSliceRule,
) -> Result<MixedOperatorRW> {
    check_lambda(lambda)?;
    let TransitionMatrix { p, zero_rows } = transition_matrix(graph);
    let a = reduced_similarity_with(triangles, graph.n(), rule);
    let h = a.mixed(1.0 - lambda, &p, lambda);
    if !zero_rows.is_empty() {
        log::warn!("{} node(s) without neighbors leave zero rows in P", zero_rows.len());
    }
    Ok(MixedOperatorRW { lambda, p, a, h, zero_rows })
}
