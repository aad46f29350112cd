//! Lloyd's k-means with k-means++ seeding and seeded restarts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions { restarts: 20, max_iter: 300, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster of each row; every cluster in `0..k` is nonempty.
    pub labels: Vec<usize>,
    /// `k x d` centroid matrix.
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub iterations: usize,
}

/// Clusters the rows of `points` into `k` groups, keeping the restart with
/// the smallest within-cluster sum of squares.
pub fn kmeans(points: &DMatrix<f64>, k: usize, opts: &KMeansOptions) -> Result<KMeansResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("cannot form {k} clusters from {n} points")));
    }
    if k == n {
        return Ok(KMeansResult { labels: (0..n).collect(), centroids: points.clone(), wcss: 0.0, iterations: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..opts.restarts.max(1) {
        let run = lloyd(points, k, opts.max_iter, &mut rng);
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols()).map(|d| (points[(i, d)] - centroids[(c, d)]).powi(2)).sum()
}

fn plus_plus(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, dim) = points.shape();
    let mut centroids = DMatrix::zeros(k, dim);
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from(&points.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(c).copy_from(&points.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centroids, c));
        }
    }
    centroids
}

fn assign(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize]) -> (bool, f64) {
    let mut changed = false;
    let mut wcss = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let (mut arg, mut dist) = (0, f64::INFINITY);
        for c in 0..centroids.nrows() {
            let d = sq_dist(points, i, centroids, c);
            if d < dist {
                arg = c;
                dist = d;
            }
        }
        changed |= *label != arg;
        *label = arg;
        wcss += dist;
    }
    (changed, wcss)
}

fn lloyd(points: &DMatrix<f64>, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> KMeansResult {
    let (n, dim) = points.shape();
    let mut centroids = plus_plus(points, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut wcss = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let (changed, total) = assign(points, &centroids, &mut labels);
        wcss = total;
        if !changed {
            break;
        }
        let mut sums = DMatrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            let mut row = sums.row_mut(l);
            row += points.row(i);
        }
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                let mean = sums.row(c) / count as f64;
                centroids.row_mut(c).copy_from(&mean);
            } else {
                // reseed from the point farthest from its centroid
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(points, a, &centroids, labels[a]).total_cmp(&sq_dist(points, b, &centroids, labels[b]))
                    })
                    .unwrap_or(0);
                centroids.row_mut(c).copy_from(&points.row(far));
                labels[far] = c;
            }
        }
    }
    fill_empty(points, &centroids, &mut labels, k);
    KMeansResult { labels, centroids, wcss, iterations }
}

/// Moves a point into every cluster that ended up empty, taking it from a
/// cluster with more than one member.
fn fill_empty(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let donor = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| {
                sq_dist(points, a, centroids, labels[a]).total_cmp(&sq_dist(points, b, centroids, labels[b]))
            })
            .expect("k <= n leaves a cluster with two members");
        labels[donor] = empty;
    }
}
