//! Compressed sparse row matrices used for the spectral operators.

use nalgebra::DMatrix;

/// A square matrix in compressed sparse row form. Column indices within a
/// row are sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_csr_parts(n: usize, indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>) -> Self {
        assert_eq!(indptr.len(), n + 1);
        assert_eq!(indices.len(), data.len());
        assert_eq!(*indptr.last().unwrap(), indices.len());
        CsrMatrix { n, indptr, indices, data }
    }

    pub fn zeros(n: usize) -> Self {
        CsrMatrix { n, indptr: vec![0; n + 1], indices: Vec::new(), data: Vec::new() }
    }

    /// Builds from `(row, col, value)` triplets; duplicate coordinates are summed
    /// and explicit zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside a {n}x{n} matrix");
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { n, indptr, indices, data }.pruned()
    }

    fn pruned(self) -> Self {
        if self.data.iter().all(|&v| v != 0.0) {
            return self;
        }
        let mut indptr = vec![0; self.n + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut data = Vec::with_capacity(self.data.len());
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                if v != 0.0 {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr[r + 1] = indices.len();
        }
        CsrMatrix { n: self.n, indptr, indices, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Nonzero entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.data[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(p) => self.data[span.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    /// `y = self * x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate().take(self.n) {
            let span = self.indptr[r]..self.indptr[r + 1];
            *out = self.indices[span.clone()].iter().zip(&self.data[span]).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// Entry-wise `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.n {
            triplets.extend(self.row(r).map(|(c, v)| (r, c, alpha * v)));
            triplets.extend(other.row(r).map(|(c, v)| (r, c, beta * v)));
        }
        CsrMatrix::from_triplets(self.n, triplets)
    }

    /// `diag(left) * self * diag(right)`
    pub fn scaled(&self, left: &[f64], right: &[f64]) -> CsrMatrix {
        let mut out = self.clone();
        for (r, &l) in left.iter().enumerate().take(self.n) {
            for p in out.indptr[r]..out.indptr[r + 1] {
                out.data[p] *= l * right[out.indices[p]];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, v)| (v - self.get(c, r)).abs() <= tol))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }
}

/// A symmetric sparse matrix. Used for weighted adjacency matrices (`W`,
/// `W_T`, `W_X`) and the normalized Laplacians built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix(CsrMatrix);

impl SparseSymMatrix {
    pub(crate) fn from_csr_parts(n: usize, indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>) -> Self {
        SparseSymMatrix(CsrMatrix::from_csr_parts(n, indptr, indices, data))
    }

    /// Wraps `m`, returning `None` unless it is symmetric within `1e-12`
    /// (relative to the largest magnitude entry).
    pub fn new(m: CsrMatrix) -> Option<Self> {
        let scale = m.data.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        m.is_symmetric(1e-12 * scale).then_some(SparseSymMatrix(m))
    }

    /// Builds from upper-or-lower triplets, mirroring every off-diagonal entry.
    pub fn from_undirected(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut triplets = Vec::new();
        for (r, c, v) in entries {
            triplets.push((r, c, v));
            if r != c {
                triplets.push((c, r, v));
            }
        }
        SparseSymMatrix(CsrMatrix::from_triplets(n, triplets))
    }

    pub fn zeros(n: usize) -> Self {
        SparseSymMatrix(CsrMatrix::zeros(n))
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn into_csr(self) -> CsrMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.0.get(r, c)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.row(r)
    }

    pub fn linear_combination(&self, alpha: f64, other: &SparseSymMatrix, beta: f64) -> SparseSymMatrix {
        SparseSymMatrix(self.0.linear_combination(alpha, &other.0, beta))
    }

    /// `diag(s) * self * diag(s)`, which preserves symmetry.
    pub fn congruence(&self, s: &[f64]) -> SparseSymMatrix {
        SparseSymMatrix(self.0.scaled(s, s))
    }
}

/// Row sums of a symmetric matrix: the (weighted) degree of every node.
pub fn degree_vector(w: &SparseSymMatrix) -> Vec<f64> {
    w.csr().row_sums()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 1, 1.0), (0, 1, 2.0), (2, 0, 1.0), (2, 0, -1.0), (1, 2, 4.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(2, 0), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 0, 2.0), (0, 2, 1.0), (1, 1, -1.0), (2, 0, 0.5)]);
        let x = [1.0, 2.0, 3.0];
        let mut y = [0.0; 3];
        m.matvec(&x, &mut y);
        let dense = m.to_dense() * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((y[i] - dense[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn degree_vectors() {
        let k3 = SparseSymMatrix::from_undirected(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        assert_eq!(degree_vector(&k3), vec![2.0, 2.0, 2.0]);
        assert_eq!(degree_vector(&SparseSymMatrix::zeros(4)), vec![0.0; 4]);
    }

    #[test]
    fn symmetry_check() {
        let asym = CsrMatrix::from_triplets(2, vec![(0, 1, 1.0)]);
        assert!(SparseSymMatrix::new(asym).is_none());
        let sym = CsrMatrix::from_triplets(2, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        assert!(SparseSymMatrix::new(sym).is_some());
    }
}
