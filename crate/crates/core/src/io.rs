//! File formats: node label files, community lists, and a binary cache of
//! enumerated triangles keyed by the content hash of the edge list.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, Graph, LoadStats};
use crate::partition::Partition;
use crate::triangles::{enumerate_triangles, TriangleIndex};

/// SHA-256 of an edge list's bytes.
pub type ContentHash = [u8; 32];

pub fn content_hash(bytes: &[u8]) -> ContentHash {
    Sha256::digest(bytes).into()
}

/// A graph loaded from disk with its ingestion counters and content hash.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub stats: LoadStats,
    pub hash: ContentHash,
}

pub fn read_graph(path: &Path) -> Result<LoadedGraph> {
    let bytes = fs::read(path)?;
    let (graph, stats) = load_edge_list(bytes.as_slice())?;
    Ok(LoadedGraph { graph, stats, hash: content_hash(&bytes) })
}

/// Reads `node label` lines. Blank lines and lines starting with `#` or `%`
/// are skipped; labels are arbitrary tokens.
pub fn read_labels<R: BufRead>(reader: R) -> Result<Vec<(u64, String)>> {
    let mut out = Vec::new();
    let mut seen = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
        let id = tokens.next().unwrap_or_default();
        let id: u64 = id.parse().map_err(|_| parse_err(format!("invalid node id {id:?}")))?;
        let label = tokens.next().ok_or_else(|| parse_err("missing label".into()))?;
        if seen.insert(id, lineno + 1).is_some() {
            return Err(parse_err(format!("node {id} labeled twice")));
        }
        out.push((id, label.to_string()));
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

pub fn read_labels_file(path: &Path) -> Result<Vec<(u64, String)>> {
    read_labels(std::io::BufReader::new(fs::File::open(path)?))
}

/// Partition of the graph's nodes from `(original id, label)` pairs.
/// Clusters are numbered in order of first appearance along the graph's
/// internal node order.
pub fn partition_from_labels(graph: &Graph, labels: &[(u64, String)]) -> Result<Partition> {
    let mut by_node: Vec<Option<&str>> = vec![None; graph.n()];
    for (id, label) in labels {
        let v = graph.internal_id(*id).ok_or(Error::UnknownNode(*id))?;
        by_node[v] = Some(label);
    }
    let labels: Vec<&str> = by_node
        .iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::Domain(format!("node {} has no label", graph.original_id(v)))))
        .collect::<Result<_>>()?;
    Ok(Partition::from_labels(&labels))
}

/// Writes `original-id cluster` lines in internal node order.
pub fn write_labels<W: Write>(mut w: W, graph: &Graph, partition: &Partition) -> Result<()> {
    for (v, l) in partition.labels().iter().enumerate() {
        writeln!(w, "{} {}", graph.original_id(v), l)?;
    }
    Ok(())
}

/// Reads one community per line as whitespace-separated original node ids.
pub fn read_communities<R: BufRead>(reader: R) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let ids = trimmed
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| Error::Parse { line: lineno + 1, message: format!("invalid node id {t:?}") }))
            .collect::<Result<Vec<_>>>()?;
        out.push(ids);
    }
    Ok(out)
}

const CACHE_MAGIC: &[u8; 8] = b"MOSCTRI1";

/// Serializes the triangle list with the hash of the edge list it came from.
pub fn encode_triangles(hash: &ContentHash, n: usize, triangles: &TriangleIndex) -> Vec<u8> {
    let mut out = Vec::with_capacity(56 + 12 * triangles.len());
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(hash);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(triangles.len() as u64).to_le_bytes());
    for t in triangles.triangles() {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Decodes a cache written by [`encode_triangles`]. Returns `None` when the
/// cache belongs to a different edge list or is malformed.
pub fn decode_triangles(bytes: &[u8], hash: &ContentHash, graph: &Graph) -> Option<TriangleIndex> {
    let header = 8 + 32 + 16;
    if bytes.len() < header || &bytes[..8] != CACHE_MAGIC || &bytes[8..40] != hash {
        return None;
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()) as usize;
    let (n, count) = (word(40), word(48));
    if n != graph.n() || bytes.len() != header + 12 * count {
        return None;
    }
    let mut triangles = Vec::with_capacity(count);
    for chunk in bytes[header..].chunks_exact(12) {
        let v = |i: usize| u32::from_le_bytes(chunk[4 * i..4 * i + 4].try_into().unwrap());
        let t = [v(0), v(1), v(2)];
        let ok = t.iter().all(|&x| (x as usize) < n)
            && graph.has_edge(t[0] as usize, t[1] as usize)
            && graph.has_edge(t[1] as usize, t[2] as usize)
            && graph.has_edge(t[0] as usize, t[2] as usize);
        if !ok {
            return None;
        }
        triangles.push(t);
    }
    Some(TriangleIndex::from_triangles(graph, triangles))
}

/// Loads triangles from `cache` if it matches, otherwise enumerates them and
/// writes the cache. Returns the index and whether the cache was used.
pub fn cached_triangles(loaded: &LoadedGraph, cache: &Path) -> Result<(TriangleIndex, bool)> {
    if let Ok(bytes) = fs::read(cache) {
        if let Some(ti) = decode_triangles(&bytes, &loaded.hash, &loaded.graph) {
            return Ok((ti, true));
        }
    }
    let ti = enumerate_triangles(&loaded.graph);
    fs::write(cache, encode_triangles(&loaded.hash, loaded.graph.n(), &ti))?;
    Ok((ti, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        let (g, _) = load_edge_list("10 20\n20 30\n".as_bytes()).unwrap();
        let labels = read_labels("# truth\n30 b\n10 a\n20 a\n".as_bytes()).unwrap();
        let p = partition_from_labels(&g, &labels).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1]);
        let mut out = Vec::new();
        write_labels(&mut out, &g, &p).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "10 0\n20 0\n30 1\n");
    }

    #[test]
    fn label_errors() {
        assert!(matches!(read_labels("1 a\n1 b\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        let (g, _) = load_edge_list("1 2\n".as_bytes()).unwrap();
        let labels = read_labels("1 a\n".as_bytes()).unwrap();
        assert!(partition_from_labels(&g, &labels).is_err());
        let labels = read_labels("1 a\n2 a\n3 b\n".as_bytes()).unwrap();
        assert!(matches!(partition_from_labels(&g, &labels), Err(Error::UnknownNode(3))));
    }

    #[test]
    fn cache_round_trip() {
        let text = b"0 1\n1 2\n2 0\n2 3\n1 3\n";
        let (g, _) = load_edge_list(&text[..]).unwrap();
        let ti = enumerate_triangles(&g);
        let hash = content_hash(text);
        let bytes = encode_triangles(&hash, g.n(), &ti);
        assert_eq!(decode_triangles(&bytes, &hash, &g), Some(ti));
        assert_eq!(decode_triangles(&bytes, &content_hash(b"other"), &g), None);
    }

    #[test]
    fn communities() {
        let c = read_communities("1 2 3\n\n4 5\n".as_bytes()).unwrap();
        assert_eq!(c, vec![vec![1, 2, 3], vec![4, 5]]);
    }
}
