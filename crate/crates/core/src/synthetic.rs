//! Seeded random graph generators for tests and smoke runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::partition::Partition;

/// Planted-partition graph: blocks of the given sizes, each within-block
/// pair joined with probability `p_in` and each cross pair with `p_out`.
pub fn planted_partition(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> (Graph, Partition) {
    let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_edges(n, edges).expect("generated edges are in range");
    (graph, Partition::from_labels(&labels))
}

/// Erdős–Rényi `G(n, p)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    planted_partition(&[n], p, 0.0, seed).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = planted_partition(&[10, 10], 0.5, 0.05, 3);
        let b = planted_partition(&[10, 10], 0.5, 0.05, 3);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.sizes(), vec![10, 10]);
        assert_eq!(erdos_renyi(6, 1.0, 0).m(), 15);
    }
}
