//! Builds two-community benchmark networks out of a large network with
//! (possibly overlapping) ground-truth communities.
//!
//! Communities no larger than `max_size` are ranked by triangles per node and
//! the `top_k` densest become seeds. Each seed is paired with the community
//! that has the most edges into it from outside the seed, and the induced
//! subgraph on their union is emitted with the seed as cluster 0 and the rest
//! of the partner as cluster 1.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::triangles::enumerate_triangles;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedNetwork {
    pub graph: Graph,
    pub truth: Partition,
    pub provenance: PairProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairProvenance {
    /// Index of the seed community in the input list.
    pub seed: usize,
    /// Index of the partner community.
    pub partner: usize,
    /// Triangles per node inside the seed.
    pub seed_density: f64,
    /// Edges between the seed and the rest of the partner.
    pub interaction_edges: usize,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Extraction {
    pub pairs: Vec<PairedNetwork>,
    /// Seeds that found no partner with a connecting edge.
    pub skipped: Vec<String>,
}

/// Maps communities of original ids to sorted, deduplicated internal ids.
pub fn resolve_communities(graph: &Graph, communities: &[Vec<u64>]) -> Result<Vec<Vec<usize>>> {
    communities
        .iter()
        .map(|c| {
            let mut ids = c.iter().map(|&id| graph.internal_id(id).ok_or(Error::UnknownNode(id))).collect::<Result<Vec<_>>>()?;
            ids.sort_unstable();
            ids.dedup();
            Ok(ids)
        })
        .collect()
}

pub fn extract_paired_communities(
    graph: &Graph,
    communities: &[Vec<u64>],
    top_k: usize,
    max_size: usize,
) -> Result<Extraction> {
    let comms = resolve_communities(graph, communities)?;

    let mut ranked: Vec<(usize, f64)> = comms
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty() && c.len() <= max_size)
        .map(|(i, c)| (i, enumerate_triangles(&graph.induced_subgraph(c)).len() as f64 / c.len() as f64))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(top_k);

    let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); graph.n()];
    for (i, c) in comms.iter().enumerate() {
        for &v in c {
            member_of[v].push(i as u32);
        }
    }

    let mut out = Extraction::default();
    let mut from_seed = vec![0usize; graph.n()];
    for (seed, density) in ranked {
        let c = &comms[seed];
        let in_seed: HashSet<usize> = c.iter().copied().collect();
        let mut touched = Vec::new();
        for &u in c {
            for &v in graph.neighbors(u) {
                let v = v as usize;
                if !in_seed.contains(&v) {
                    if from_seed[v] == 0 {
                        touched.push(v);
                    }
                    from_seed[v] += 1;
                }
            }
        }
        let mut score = vec![0usize; comms.len()];
        for &v in &touched {
            for &d in &member_of[v] {
                score[d as usize] += from_seed[v];
            }
            from_seed[v] = 0;
        }
        let partner = score
            .iter()
            .enumerate()
            .filter(|&(d, &s)| d != seed && s > 0)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(d, &s)| (d, s));
        let Some((partner, interaction_edges)) = partner else {
            out.skipped.push(format!("community {seed}: no other community shares an edge with it"));
            continue;
        };
        let rest: Vec<usize> = comms[partner].iter().copied().filter(|v| !in_seed.contains(v)).collect();
        let nodes: Vec<usize> = c.iter().chain(&rest).copied().collect();
        let sub = graph.induced_subgraph(&nodes);
        let labels: Vec<usize> = (0..nodes.len()).map(|i| usize::from(i >= c.len())).collect();
        out.pairs.push(PairedNetwork {
            truth: Partition::new(labels, 2)?,
            provenance: PairProvenance {
                seed,
                partner,
                seed_density: density,
                interaction_edges,
                nodes: sub.n(),
                edges: sub.m(),
            },
            graph: sub,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
        let comms = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let ex = extract_paired_communities(&g, &comms, 1, 10).unwrap();
        assert_eq!(ex.pairs.len(), 1);
        let p = &ex.pairs[0];
        assert_eq!((p.graph.n(), p.graph.m(), p.provenance.interaction_edges), (6, 7, 1));
        assert_eq!(p.truth.sizes(), vec![3, 3]);

        assert!(extract_paired_communities(&g, &comms, 5, 2).unwrap().pairs.is_empty());
        assert!(matches!(extract_paired_communities(&g, &[vec![9]], 1, 5), Err(Error::UnknownNode(9))));
    }

    #[test]
    fn isolated_seed_is_skipped() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let ex = extract_paired_communities(&g, &[vec![0, 1, 2], vec![3, 4]], 2, 10).unwrap();
        assert!(ex.pairs.is_empty());
        assert_eq!(ex.skipped.len(), 2);
    }
}
