//! Undirected, unweighted simple graphs in compressed adjacency form.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::sparse::SparseSymMatrix;

/// An immutable undirected simple graph.
///
/// Internal node ids are contiguous `0..n`. The id each node carried in the
/// source file is kept so outputs can be reported in the caller's terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    original_ids: Vec<u64>,
    lookup: HashMap<u64, u32>,
}

/// Counters collected while ingesting an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a graph over internal ids `0..n`. Self-loops and repeated edges
    /// (in either orientation) are discarded.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let ids = (0..n as u64).collect();
        Self::build(ids, edges).map(|(g, _)| g)
    }

    fn build<I>(original_ids: Vec<u64>, edges: I) -> Result<(Graph, LoadStats)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = original_ids.len();
        if n > u32::MAX as usize {
            return Err(Error::Domain(format!("{n} nodes exceeds the supported maximum")));
        }
        let mut stats = LoadStats::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) references a node outside 0..{n}")));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            pairs.push((u.min(v) as u32, u.max(v) as u32));
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        stats.duplicates = before - pairs.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in &pairs {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let lookup = original_ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
        Ok((Graph { offsets, neighbors, original_ids, lookup }, stats))
    }

    pub fn n(&self) -> usize {
        self.original_ids.len()
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Position of `v` inside the flat adjacency array of `u`, if the edge exists.
    pub(crate) fn edge_slot(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbors(u).binary_search(&(v as u32)).ok().map(|p| self.offsets[u] + p)
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| (v as usize) > u).map(move |&v| (u, v as usize))
        })
    }

    pub fn original_id(&self, node: usize) -> u64 {
        self.original_ids[node]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn internal_id(&self, original: u64) -> Option<usize> {
        self.lookup.get(&original).map(|&i| i as usize)
    }

    /// Unit-weight adjacency matrix `W`.
    pub fn adjacency(&self) -> SparseSymMatrix {
        SparseSymMatrix::from_csr_parts(
            self.n(),
            self.offsets.clone(),
            self.neighbors.iter().map(|&v| v as usize).collect(),
            vec![1.0; self.neighbors.len()],
        )
    }

    /// Returns a copy with extra isolated nodes appended for every id in
    /// `ids` that the graph does not already contain.
    pub fn with_nodes<I: IntoIterator<Item = u64>>(&self, ids: I) -> Graph {
        let mut g = self.clone();
        for id in ids {
            if g.lookup.contains_key(&id) {
                continue;
            }
            g.lookup.insert(id, g.original_ids.len() as u32);
            g.original_ids.push(id);
            g.offsets.push(*g.offsets.last().unwrap());
        }
        g
    }

    /// Subgraph induced by `nodes` (internal ids). Node `i` of the result is
    /// `nodes[i]`; original ids are carried over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut local = HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for &v in self.neighbors(u) {
                if let Some(&j) = local.get(&(v as usize)) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let ids = nodes.iter().map(|&v| self.original_ids[v]).collect();
        Self::build(ids, edges).expect("induced subgraph of a valid graph").0
    }

    /// Connected component label of every node, numbered in order of the
    /// smallest node they contain.
    pub fn components(&self) -> (usize, Vec<usize>) {
        connected_components(self.n(), |u| self.neighbors(u).iter().map(|&v| v as usize))
    }
}

pub(crate) fn connected_components<F, I>(n: usize, mut neighbors: F) -> (usize, Vec<usize>)
where
    F: FnMut(usize) -> I,
    I: Iterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut label = vec![UNSEEN; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != UNSEEN {
            continue;
        }
        label[start] = count;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for v in neighbors(u) {
                if label[v] == UNSEEN {
                    label[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    (count, label)
}

/// Reads a whitespace-separated edge list. Lines that are blank or start with
/// `#` or `%` are skipped. Node ids are remapped to `0..n` in order of first
/// appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadStats)> {
    let mut ids = Vec::new();
    let mut lookup: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |id: u64| {
        *lookup.entry(id).or_insert_with(|| {
            ids.push(id);
            ids.len() - 1
        })
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = |what: &str| -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("missing {what} node id"),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let u = next_id("source")?;
        let v = next_id("target")?;
        edges.push((intern(u), intern(v)));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (graph, stats) = Graph::build(ids, edges)?;
    if stats.self_loops > 0 {
        log::warn!("dropped {} self-loop(s)", stats.self_loops);
    }
    Ok((graph, stats))
}
