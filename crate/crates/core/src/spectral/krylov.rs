//! Thick-restart Krylov eigensolver.
//!
//! Maintains an orthonormal basis `V` and coefficients `G` with
//! `M V_m = V_{m+1} G`, where `G` is `(m+1) x m`. Each cycle extends the
//! basis to `m` vectors, computes Ritz pairs of the leading `m x m` block,
//! and restarts from an orthonormal basis of the wanted Ritz vectors plus the
//! last basis vector. For symmetric operators this is thick-restart Lanczos
//! with full reorthogonalization; otherwise it is a Krylov-Schur style
//! restarted Arnoldi.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::dense::{fix_phase, general_eigen, symmetric_eigen, C64};
use super::LinearOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Target {
    /// Smallest algebraic eigenvalues of a symmetric operator.
    SmallestSymmetric,
    /// Largest real parts of a general operator.
    LargestReal,
}

pub(crate) struct KrylovOutput {
    pub values: Vec<C64>,
    /// Ritz vectors in the original space (complex for nonsymmetric targets).
    pub vectors: Vec<DVector<C64>>,
    pub matvecs: usize,
}

struct RitzPair {
    value: C64,
    coeffs: DVector<C64>,
    residual: f64,
}

pub(crate) fn solve<M: LinearOperator + ?Sized>(
    op: &M,
    k: usize,
    target: Target,
    subspace: usize,
    tol: f64,
    max_matvecs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<KrylovOutput> {
    let n = op.dim();
    let m = subspace.clamp(k + 2, n);
    let norm = op.frobenius_norm().max(f64::MIN_POSITIVE);
    let threshold = 0.5 * tol * norm;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(random_unit(n, &[], rng));
    let mut g = DMatrix::<f64>::zeros(m + 1, m);
    let mut size = 0;
    let mut matvecs = 0;
    let mut best_residual = f64::INFINITY;
    let mut w = vec![0.0; n];

    loop {
        // extend to m vectors
        while size < m {
            op.apply(&basis[size], &mut w);
            matvecs += 1;
            let mut coeffs = vec![0.0; size + 1];
            for _ in 0..2 {
                for (c, v) in coeffs.iter_mut().zip(&basis) {
                    let h = dot(v, &w);
                    *c += h;
                    axpy(-h, v, &mut w);
                }
            }
            for (row, c) in coeffs.iter().enumerate() {
                g[(row, size)] = *c;
            }
            let beta = dot(&w, &w).sqrt();
            if beta > 1e-12 * norm {
                g[(size + 1, size)] = beta;
                basis.push(w.iter().map(|x| x / beta).collect());
            } else {
                // invariant subspace found; continue with a fresh direction
                g[(size + 1, size)] = 0.0;
                let fresh = random_unit(n, &basis, rng);
                basis.push(fresh);
            }
            size += 1;
        }

        let ritz = ritz_pairs(&g, m, target, rng);
        let residual = ritz.iter().take(k).map(|p| p.residual).fold(0.0, f64::max);
        best_residual = best_residual.min(residual);
        let converged = residual <= threshold;
        if converged || matvecs >= max_matvecs {
            if !converged {
                return Err(Error::NoConvergence { iterations: matvecs, residual: best_residual / norm });
            }
            let vectors = ritz
                .iter()
                .take(k)
                .map(|p| {
                    let mut y = DVector::<C64>::zeros(n);
                    for (j, v) in basis.iter().take(m).enumerate() {
                        let c = p.coeffs[j];
                        for (yi, vi) in y.iter_mut().zip(v) {
                            *yi += c * *vi;
                        }
                    }
                    y
                })
                .collect();
            return Ok(KrylovOutput { values: ritz.iter().take(k).map(|p| p.value).collect(), vectors, matvecs });
        }

        // restart: keep the wanted Ritz subspace, never splitting a conjugate pair
        let mut keep = (k + (m - k) / 2).min(m - 1).max(k);
        if keep < ritz.len() && ritz[keep - 1].value.im > 0.0 && keep + 1 < m {
            keep += 1;
        }
        let mut columns: Vec<DVector<f64>> = Vec::with_capacity(keep);
        for p in ritz.iter().take(keep) {
            if p.value.im.abs() <= 1e-14 * norm {
                columns.push(p.coeffs.map(|z| z.re));
            } else if p.value.im > 0.0 {
                columns.push(p.coeffs.map(|z| z.re));
                columns.push(p.coeffs.map(|z| z.im));
            }
        }
        let q = orthonormal_columns(&columns, m);
        let p = q.ncols();
        let gm = g.view((0, 0), (m, m)).into_owned();
        let last_row = g.view((m, 0), (1, m)).into_owned();
        let s = q.transpose() * &gm * &q;
        let b = last_row * &q;

        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for c in 0..p {
            let mut v = vec![0.0; n];
            for (j, bj) in basis.iter().take(m).enumerate() {
                axpy(q[(j, c)], bj, &mut v);
            }
            new_basis.push(v);
        }
        new_basis.push(basis[m].clone());
        basis = new_basis;
        g.fill(0.0);
        g.view_mut((0, 0), (p, p)).copy_from(&s);
        g.view_mut((p, 0), (1, p)).copy_from(&b);
        size = p;
    }
}

fn ritz_pairs(g: &DMatrix<f64>, m: usize, target: Target, rng: &mut ChaCha8Rng) -> Vec<RitzPair> {
    let gm = g.view((0, 0), (m, m)).into_owned();
    let last = g.row(m).into_owned();
    match target {
        Target::SmallestSymmetric => {
            let (values, vectors) = symmetric_eigen(&gm);
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let s = vectors.column(i);
                    RitzPair {
                        value: C64::new(v, 0.0),
                        coeffs: s.map(|x| C64::new(x, 0.0)),
                        residual: (last.clone() * s)[(0, 0)].abs(),
                    }
                })
                .collect()
        }
        Target::LargestReal => general_eigen(&gm, m, rng)
            .into_iter()
            .map(|p| {
                let coeffs = fix_phase(&p.vector);
                let residual = last.iter().zip(coeffs.iter()).map(|(l, c)| *c * *l).sum::<C64>().norm();
                RitzPair { value: p.value, coeffs, residual }
            })
            .collect(),
    }
}

fn orthonormal_columns(columns: &[DVector<f64>], rows: usize) -> DMatrix<f64> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(columns.len());
    for c in columns {
        let mut v = c.clone();
        for _ in 0..2 {
            for q in &out {
                let h = q.dot(&v);
                v.axpy(-h, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-10 {
            out.push(v / norm);
        }
    }
    if out.is_empty() {
        return DMatrix::zeros(rows, 0);
    }
    DMatrix::from_columns(&out)
}

fn random_unit(n: usize, against: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        for _ in 0..2 {
            for q in against {
                let h = dot(q, &v);
                axpy(-h, q, &mut v);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
