//! Node sets and hard partitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subset of the nodes `0..n`, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    mask: Vec<bool>,
    len: usize,
}

impl NodeSet {
    pub fn empty(n: usize) -> NodeSet {
        NodeSet { mask: vec![false; n], len: 0 }
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> NodeSet {
        let mut s = NodeSet::empty(n);
        for v in members {
            s.insert(v);
        }
        s
    }

    /// The set whose members are the set bits of `bits` (bit `i` is node `i`).
    pub fn from_bits(n: usize, bits: u64) -> NodeSet {
        NodeSet::from_members(n, (0..n).filter(|&i| bits >> i & 1 == 1))
    }

    pub fn insert(&mut self, v: usize) {
        if !self.mask[v] {
            self.mask[v] = true;
            self.len += 1;
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Size of the ground set.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    /// Neither empty nor the whole ground set.
    pub fn is_proper(&self) -> bool {
        self.len > 0 && self.len < self.mask.len()
    }

    pub fn complement(&self) -> NodeSet {
        NodeSet { mask: self.mask.iter().map(|b| !b).collect(), len: self.mask.len() - self.len }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Assignment of every node to one of `k` nonempty clusters `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates that every label is below `k` and every cluster is used.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Partition> {
        let mut used = vec![false; k];
        for (node, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::Domain(format!("node {node} has label {l}, expected fewer than {k} clusters")));
            }
            used[l] = true;
        }
        if let Some(c) = used.iter().position(|u| !u) {
            return Err(Error::Domain(format!("cluster {c} of {k} is empty")));
        }
        Ok(Partition { labels, k })
    }

    /// Renumbers arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels<T: Eq + std::hash::Hash + Clone>(labels: &[T]) -> Partition {
        let mut ids = std::collections::HashMap::new();
        let labels = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition { labels, k: ids.len() }
    }

    /// `{S, complement}` with `S` as cluster 0.
    pub fn bipartition(s: &NodeSet) -> Partition {
        let labels: Vec<usize> = s.mask().iter().map(|&b| usize::from(!b)).collect();
        let k = if s.is_proper() { 2 } else { 1 };
        if s.is_empty() {
            return Partition { labels: vec![0; s.universe()], k };
        }
        Partition { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    pub fn cluster_set(&self, c: usize) -> NodeSet {
        NodeSet::from_members(self.n(), self.labels.iter().enumerate().filter(|(_, &l)| l == c).map(|(v, _)| v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeling_follows_first_appearance() {
        let p = Partition::from_labels(&["b", "a", "b", "c"]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.k(), 3);
        assert_eq!(p.sizes(), vec![2, 1, 1]);
    }

    #[test]
    fn empty_cluster_rejected() {
        assert!(Partition::new(vec![0, 0, 2], 3).is_err());
        assert!(Partition::new(vec![0, 1, 2], 3).is_ok());
    }

    #[test]
    fn node_set_basics() {
        let s = NodeSet::from_bits(4, 0b0101);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(s.is_proper());
        assert_eq!(s.complement().iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(Partition::bipartition(&s).labels(), &[0, 1, 0, 1]);
    }
}
