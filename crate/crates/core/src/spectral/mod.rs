//! Eigensolvers for the sweep-cut orderings and multiway embeddings.
//!
//! Small operators are decomposed densely. Larger ones go through a
//! thick-restart Krylov method with full reorthogonalization.

mod dense;
mod krylov;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::SimilarityMatrix;
use crate::sparse::{CsrMatrix, SparseSymMatrix};
use dense::{fix_phase, general_eigen, symmetric_eigen, C64};
use krylov::Target;

/// A real square matrix that can be applied to vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = M x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn to_dense(&self) -> DMatrix<f64>;
    fn frobenius_norm(&self) -> f64;
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
    fn to_dense(&self) -> DMatrix<f64> {
        CsrMatrix::to_dense(self)
    }
    fn frobenius_norm(&self) -> f64 {
        CsrMatrix::frobenius_norm(self)
    }
}

impl LinearOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        SparseSymMatrix::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.csr().matvec(x, y)
    }
    fn to_dense(&self) -> DMatrix<f64> {
        self.csr().to_dense()
    }
    fn frobenius_norm(&self) -> f64 {
        self.csr().frobenius_norm()
    }
}

impl LinearOperator for SimilarityMatrix {
    fn dim(&self) -> usize {
        SimilarityMatrix::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
    fn to_dense(&self) -> DMatrix<f64> {
        SimilarityMatrix::to_dense(self)
    }
    fn frobenius_norm(&self) -> f64 {
        SimilarityMatrix::frobenius_norm(self)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let out = self * DVector::from_column_slice(x);
        y.copy_from_slice(out.as_slice());
    }
    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
    fn frobenius_norm(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Residual tolerance relative to the Frobenius norm of the operator.
    pub tol: f64,
    /// Matrix-vector product budget for the Krylov path; `None` means
    /// `max(10 n, 1000)`.
    pub max_matvecs: Option<usize>,
    pub seed: u64,
    /// Operators up to this dimension are decomposed densely.
    pub dense_threshold: usize,
    /// Krylov subspace size.
    pub subspace: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-8, max_matvecs: None, seed: 42, dense_threshold: 300, subspace: 64 }
    }
}

/// Eigenpairs in the requested order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Eigenvalues (real parts).
    pub values: Vec<f64>,
    /// Imaginary parts; all zero for symmetric input.
    pub imag: Vec<f64>,
    /// Unit-norm real vectors, one per value, sign-fixed so the first entry
    /// of maximal magnitude is positive.
    pub vectors: Vec<Vec<f64>>,
    /// `||M v - lambda v||_2` of each (possibly complex) eigenpair.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub dense: bool,
    pub warnings: Vec<String>,
}

impl EigenResult {
    /// Vectors as an `n x k` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.vectors.first().map_or(0, Vec::len);
        DMatrix::from_fn(n, self.vectors.len(), |r, c| self.vectors[c][r])
    }
}

/// The `k` smallest eigenpairs of a symmetric operator, ascending.
pub fn smallest_eigenpairs_sym<M: LinearOperator + ?Sized>(m: &M, k: usize, opts: &EigenOptions) -> Result<EigenResult> {
    let n = check_request(m, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (values, vectors, matvecs, dense) = if n <= opts.dense_threshold || k + 2 > n {
        let (values, vectors) = symmetric_eigen(&m.to_dense());
        let vectors = (0..k).map(|c| vectors.column(c).map(|x| C64::new(x, 0.0))).collect();
        (values[..k].iter().map(|&v| C64::new(v, 0.0)).collect(), vectors, 0, true)
    } else {
        let out = krylov::solve(m, k, Target::SmallestSymmetric, opts.subspace, opts.tol, budget(n, opts), &mut rng)?;
        (out.values, out.vectors, out.matvecs, false)
    };
    Ok(finish(m, values, vectors, matvecs, dense))
}

/// The `k` eigenpairs of largest real part of a general operator, in
/// descending real part. Complex eigenvalues produce a warning; the real
/// part of the phase-normalized vector is returned (the imaginary part for
/// the second member of a conjugate pair).
pub fn largest_eigenpairs<M: LinearOperator + ?Sized>(m: &M, k: usize, opts: &EigenOptions) -> Result<EigenResult> {
    let n = check_request(m, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (values, vectors, matvecs, dense) = if n <= opts.dense_threshold || k + 2 > n {
        let pairs = general_eigen(&m.to_dense(), k, &mut rng);
        let values = pairs.iter().map(|p| p.value).collect();
        (values, pairs.into_iter().map(|p| p.vector).collect(), 0, true)
    } else {
        let out = krylov::solve(m, k, Target::LargestReal, opts.subspace, opts.tol, budget(n, opts), &mut rng)?;
        (out.values, out.vectors, out.matvecs, false)
    };
    Ok(finish(m, values, vectors, matvecs, dense))
}

fn check_request<M: LinearOperator + ?Sized>(m: &M, k: usize) -> Result<usize> {
    let n = m.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("cannot compute {k} eigenpairs of a {n}x{n} operator")));
    }
    Ok(n)
}

fn budget(n: usize, opts: &EigenOptions) -> usize {
    opts.max_matvecs.unwrap_or((10 * n).max(1000))
}

fn finish<M: LinearOperator + ?Sized>(
    m: &M,
    values: Vec<C64>,
    vectors: Vec<DVector<C64>>,
    matvecs: usize,
    dense: bool,
) -> EigenResult {
    let mut warnings = Vec::new();
    let mut real_vectors = Vec::with_capacity(vectors.len());
    let mut residuals = Vec::with_capacity(vectors.len());
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for (j, (value, v)) in values.iter().zip(&vectors).enumerate() {
        let norm = v.norm();
        let v = if norm > 0.0 { v / C64::new(norm, 0.0) } else { v.clone() };
        residuals.push(complex_residual(m, *value, &v));
        let rotated = fix_phase(&v);
        let complex = value.im.abs() > 1e-8 * scale;
        let part = if complex && value.im < 0.0 { rotated.map(|z| z.im) } else { rotated.map(|z| z.re) };
        if complex {
            warnings.push(format!(
                "eigenvalue {j} is complex ({:.6e} {:+.6e}i); using the {} part of its eigenvector",
                value.re,
                value.im,
                if value.im < 0.0 { "imaginary" } else { "real" }
            ));
        }
        real_vectors.push(sign_fixed(part.as_slice().to_vec()));
    }
    EigenResult {
        values: values.iter().map(|v| v.re).collect(),
        imag: values.iter().map(|v| v.im).collect(),
        vectors: real_vectors,
        residuals,
        matvecs,
        dense,
        warnings,
    }
}

fn complex_residual<M: LinearOperator + ?Sized>(m: &M, value: C64, v: &DVector<C64>) -> f64 {
    let n = v.len();
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    let mut mre = vec![0.0; n];
    let mut mim = vec![0.0; n];
    m.apply(&re, &mut mre);
    m.apply(&im, &mut mim);
    (0..n).map(|i| (C64::new(mre[i], mim[i]) - value * v[i]).norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes `v` and flips its sign so that the first entry of (near)
/// maximal magnitude is positive.
pub fn sign_fixed(mut v: Vec<f64>) -> Vec<f64> {
    let norm = krylov::dot(&v, &v).sqrt();
    if norm == 0.0 {
        return v;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    let max = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if let Some(pivot) = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if *pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::operators::{normalized_laplacian, transition_matrix};

    fn opts_krylov() -> EigenOptions {
        EigenOptions { dense_threshold: 0, subspace: 12, ..EigenOptions::default() }
    }

    #[test]
    fn k2_laplacian() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let l = normalized_laplacian(&g.adjacency()).unwrap();
        let r = smallest_eigenpairs_sym(&l, 2, &EigenOptions::default()).unwrap();
        assert!(r.values[0].abs() < 1e-12 && (r.values[1] - 2.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.vectors[1][0] - s).abs() < 1e-12 && (r.vectors[1][1] + s).abs() < 1e-12);
    }

    #[test]
    fn transition_of_k3() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = transition_matrix(&g).p;
        let r = largest_eigenpairs(&p, 3, &EigenOptions::default()).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-10);
        assert!((r.values[1] + 0.5).abs() < 1e-10 && (r.values[2] + 0.5).abs() < 1e-10);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn krylov_matches_dense_on_a_ring() {
        let n = 40;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).chain((0..n).step_by(3).map(|i| (i, (i + 7) % n))).collect();
        let g = Graph::from_edges(n, edges).unwrap();
        let l = normalized_laplacian(&g.adjacency()).unwrap();
        let dense = smallest_eigenpairs_sym(&l, 3, &EigenOptions::default()).unwrap();
        let kry = smallest_eigenpairs_sym(&l, 3, &opts_krylov()).unwrap();
        assert!(!kry.dense);
        for j in 0..3 {
            assert!((dense.values[j] - kry.values[j]).abs() < 1e-8);
            assert!(kry.residuals[j] <= 1e-8 * l.csr().frobenius_norm());
        }

        let p = transition_matrix(&g).p;
        let dense = largest_eigenpairs(&p, 2, &EigenOptions::default()).unwrap();
        let kry = largest_eigenpairs(&p, 2, &opts_krylov()).unwrap();
        for j in 0..2 {
            assert!((dense.values[j] - kry.values[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn rotation_warns() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let r = largest_eigenpairs(&m, 2, &EigenOptions::default()).unwrap();
        assert_eq!(r.warnings.len(), 2);
        assert!(r.residuals.iter().all(|&x| x < 1e-10));
    }
}
