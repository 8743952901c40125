//! Undirected simple graphs in compressed adjacency form, plus the edge-list loader.
//!
//! Loading follows the usual SNAP conventions: one `u v` pair per line, `#` starts a
//! comment. Self-loops are dropped, repeated edges collapse to one, and nodes left
//! without any incident edge are removed before the ids are densely re-indexed.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense internal node index.
pub type NodeId = u32;

/// How external node ids are interpreted while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdMode {
    /// Ids must be non-negative integers; internal order follows numeric value.
    #[default]
    Numeric,
    /// Ids are opaque tokens; internal order follows byte-wise string order.
    Text,
}

/// Counters for input records that cleaning discarded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningStats {
    pub self_loops: usize,
    pub duplicate_edges: usize,
    pub removed_isolated_nodes: usize,
}

/// Immutable undirected simple graph with no degree-0 nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<String>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from labelled endpoints, applying the cleaning rules.
    ///
    /// `labels[i]` names node `i` of the edge endpoints. Nodes whose index never
    /// appears in a non-loop edge are dropped and the rest keep their relative order.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<(Graph, CleaningStats)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        let mut stats = CleaningStats::default();
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicate_edges = before - pairs.len();
        if pairs.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut remap = vec![NodeId::MAX; n];
        let mut kept_labels = Vec::new();
        for (old, label) in labels.into_iter().enumerate() {
            if degree[old] > 0 {
                remap[old] = kept_labels.len() as NodeId;
                kept_labels.push(label);
            } else {
                stats.removed_isolated_nodes += 1;
            }
        }

        let n = kept_labels.len();
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &pairs {
            offsets[remap[u as usize] as usize + 1] += 1;
            offsets[remap[v as usize] as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in &pairs {
            let (a, b) = (remap[u as usize], remap[v as usize]);
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }

        Ok((
            Graph {
                offsets,
                targets,
                labels: kept_labels,
                edge_count: pairs.len(),
            },
            stats,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbour list of `node`.
    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        let i = node as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        0..self.node_count() as NodeId
    }

    /// External id of `node`.
    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks up the internal index of an external id.
    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as NodeId)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// Writes the graph back out as an edge list using the external ids.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edge_count * 12);
        for (u, v) in self.edges() {
            out.push_str(self.label(u));
            out.push(' ');
            out.push_str(self.label(v));
            out.push('\n');
        }
        out
    }

    /// Returns the graph with nodes relabelled so that old node `i` becomes
    /// `perm[i]`. External ids travel with their nodes.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Graph> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        let mut labels = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            let new = new as usize;
            if new >= n || seen[new] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[new] = true;
            labels[new] = self.labels[old].clone();
        }
        let edges: Vec<_> = self
            .edges()
            .map(|(u, v)| (perm[u as usize], perm[v as usize]))
            .collect();
        Graph::from_edges(labels, edges).map(|(g, _)| g)
    }
}

/// A loaded graph together with what cleaning removed.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub stats: CleaningStats,
}

/// Parses a whitespace-separated edge list.
pub fn load_edge_list<R: BufRead>(reader: R, mode: IdMode) -> Result<LoadedGraph> {
    let mut raw: Vec<(String, String)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (u, v) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected two node ids, found {trimmed:?}"),
                })
            }
        };
        raw.push((canonical_id(u, mode, line_no)?, canonical_id(v, mode, line_no)?));
    }

    let mut ids: Vec<&str> = raw
        .iter()
        .flat_map(|(u, v)| [u.as_str(), v.as_str()])
        .collect();
    match mode {
        IdMode::Numeric => ids.sort_unstable_by_key(|s| s.parse::<u64>().unwrap_or(u64::MAX)),
        IdMode::Text => ids.sort_unstable(),
    }
    ids.dedup();
    let index: HashMap<&str, NodeId> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (*s, i as NodeId))
        .collect();
    let edges: Vec<(NodeId, NodeId)> = raw
        .iter()
        .map(|(u, v)| (index[u.as_str()], index[v.as_str()]))
        .collect();
    let labels = ids.into_iter().map(str::to_owned).collect();
    let (graph, stats) = Graph::from_edges(labels, edges)?;
    Ok(LoadedGraph { graph, stats })
}

fn canonical_id(token: &str, mode: IdMode, line: usize) -> Result<String> {
    match mode {
        IdMode::Text => Ok(token.to_owned()),
        IdMode::Numeric => token
            .parse::<u64>()
            .map(|n| n.to_string())
            .map_err(|_| Error::Parse {
                line,
                message: format!("node id {token:?} is not a non-negative integer"),
            }),
    }
}

/// Loads an edge-list file, transparently decompressing gzip input.
pub fn read_edge_list_file(path: &Path, mode: IdMode) -> Result<LoadedGraph> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let read = file.read(&mut magic)?;
    let file = File::open(path)?;
    if read == 2 && magic == [0x1f, 0x8b] {
        load_edge_list(BufReader::new(MultiGzDecoder::new(file)), mode)
    } else {
        load_edge_list(BufReader::new(file), mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<LoadedGraph> {
        load_edge_list(text.as_bytes(), IdMode::Numeric)
    }

    #[test]
    fn triangle() {
        let g = load("0 1\n1 2\n2 0").unwrap().graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn self_loop_dropped() {
        let loaded = load("0 0\n0 1").unwrap();
        assert_eq!(loaded.graph.node_count(), 2);
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.stats.self_loops, 1);
    }

    #[test]
    fn node_with_only_self_loop_removed() {
        let loaded = load("5 5\n0 1\n1 2").unwrap();
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.stats.removed_isolated_nodes, 1);
        assert!(loaded.graph.find("5").is_none());
    }

    #[test]
    fn duplicates_collapse() {
        let loaded = load("0 1\n1 0\n0 1\n1 2").unwrap();
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.stats.duplicate_edges, 2);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = load("# header\n\n  # indented\n10 20\n").unwrap().graph;
        assert_eq!(g.labels(), &["10".to_string(), "20".to_string()]);
    }

    #[test]
    fn numeric_ids_order_by_value() {
        let g = load("10 9\n9 100").unwrap().graph;
        assert_eq!(g.labels(), &["9", "10", "100"]);
    }

    #[test]
    fn text_ids() {
        let g = load_edge_list("b a\nc a".as_bytes(), IdMode::Text)
            .unwrap()
            .graph;
        assert_eq!(g.labels(), &["a", "b", "c"]);
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("0 1\n1 2 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load("# c\nx 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("7\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_after_cleaning() {
        assert!(matches!(load("1 1\n2 2\n"), Err(Error::EmptyGraph)));
        assert!(matches!(load("# nothing\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn gzip_input() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        enc.write_all(b"0 1\n1 2\n").unwrap();
        enc.finish().unwrap();
        let g = read_edge_list_file(&path, IdMode::Numeric).unwrap().graph;
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn permutation_keeps_labels_with_nodes() {
        let g = load("0 1\n1 2\n2 3").unwrap().graph;
        let p = g.permuted(&[3, 2, 1, 0]).unwrap();
        assert_eq!(p.label(0), "3");
        assert_eq!(p.neighbors(3), &[2]);
    }
}
