//! Dense eigen-decompositions used for small operators and for the projected
//! matrices inside the Krylov solver.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(crate) type C64 = Complex<f64>;

/// All eigenpairs of the symmetric part of `m`, eigenvalues ascending.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// One eigenpair of a general real matrix. `vector` has unit 2-norm.
#[derive(Debug, Clone)]
pub(crate) struct ComplexPair {
    pub value: C64,
    pub vector: DVector<C64>,
}

/// Eigenpairs of a general real matrix, sorted by descending real part (and
/// descending imaginary part among equal real parts, so a conjugate pair is
/// adjacent with the positive member first). Only the leading `count`
/// pairs get eigenvectors; eigenvalues come from the real Schur form and
/// vectors from shifted inverse iteration.
pub(crate) fn general_eigen(m: &DMatrix<f64>, count: usize, rng: &mut ChaCha8Rng) -> Vec<ComplexPair> {
    let n = m.nrows();
    let mut values: Vec<C64> = m.clone().complex_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let same = |a: C64, b: C64| (a - b).norm() <= 1e-9 * scale;

    let count = count.min(n);
    let mut pairs: Vec<ComplexPair> = Vec::with_capacity(count);
    let mut i = 0;
    while pairs.len() < count {
        let value = values[i];
        if value.im < 0.0 {
            if let Some(partner) = pairs.iter().rev().find(|p| same(p.value, value.conj())) {
                let vector = partner.vector.map(|z| z.conj());
                pairs.push(ComplexPair { value, vector });
                i += 1;
                continue;
            }
        }
        // group of numerically repeated eigenvalues starting at i
        let mut group = 1;
        while i + group < n && same(values[i + group], value) {
            group += 1;
        }
        let basis = inverse_iteration(m, value, group, scale, rng);
        for c in 0..group {
            if pairs.len() == count {
                break;
            }
            pairs.push(ComplexPair { value: values[i + c], vector: basis.column(c).into_owned() });
        }
        i += group;
    }
    pairs
}

/// Orthonormal basis of the (approximate) eigenspace of `m` for `value`.
fn inverse_iteration(m: &DMatrix<f64>, value: C64, dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let n = m.nrows();
    let mut shift = 1e-10 * scale;
    let mut x = DMatrix::from_fn(n, dim, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    for _ in 0..8 {
        let mut shifted = m.map(|v| C64::new(v, 0.0));
        for d in 0..n {
            shifted[(d, d)] -= value + C64::new(shift, 0.0);
        }
        let lu = shifted.lu();
        let mut ok = true;
        for _ in 0..3 {
            match lu.solve(&x) {
                Some(next) if next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                    x = orthonormalize(next);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return x;
        }
        shift *= 100.0;
    }
    x
}

fn orthonormalize(x: DMatrix<C64>) -> DMatrix<C64> {
    let cols = x.ncols();
    let q = x.qr().q();
    q.columns(0, cols).into_owned()
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
pub(crate) fn fix_phase(v: &DVector<C64>) -> DVector<C64> {
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(C64::new(1.0, 0.0));
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    let rot = pivot.conj() / pivot.norm();
    v.map(|z| z * rot)
}
