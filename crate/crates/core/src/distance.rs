//! Hop distances between hubs.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId};

pub type Distance = u32;

/// Distance assigned to pairs with no connecting path.
pub const D_INF: Distance = Distance::MAX;

/// Square symmetric matrix of hop distances between labelled communities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    size: usize,
    data: Vec<Distance>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major entries; `data.len()` must be `labels.len()²`.
    pub fn from_rows(labels: Vec<String>, data: Vec<Distance>) -> Self {
        let size = labels.len();
        assert_eq!(data.len(), size * size, "distance matrix must be square");
        DistanceMatrix { labels, size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize) -> Distance {
        self.data[p * self.size + q]
    }

    pub fn row(&self, p: usize) -> &[Distance] {
        &self.data[p * self.size..(p + 1) * self.size]
    }

    /// Largest finite off-diagonal entry, if any.
    pub fn eps_max(&self) -> Option<Distance> {
        let mut best = None;
        for p in 0..self.size {
            for (q, &d) in self.row(p).iter().enumerate() {
                if q != p && d != D_INF && best.is_none_or(|b| d > b) {
                    best = Some(d);
                }
            }
        }
        best
    }
}

/// BFS hop counts from one source to every node; unreachable nodes get `D_INF`.
pub fn bfs(g: &Graph, source: NodeId) -> Vec<Distance> {
    let mut dist = vec![D_INF; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u as usize] + 1;
        for &v in g.neighbors(u) {
            if dist[v as usize] == D_INF {
                dist[v as usize] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Sources explored together by one bit-parallel BFS pass.
const BATCH: usize = 256;
const WORDS: usize = BATCH / 64;
type Lanes = [u64; WORDS];

/// Pairwise shortest-path hop counts between `hubs`, labelled by the hubs' external ids.
///
/// Hubs are processed in batches of 256 sources sharing one traversal: each
/// node carries a bitmask of the sources that have reached it, and a level
/// advances every source at once. Batches run in parallel; the matrix is
/// identical for any worker count and equal to one plain BFS per hub.
pub fn hub_distances(g: &Graph, hubs: &[NodeId]) -> DistanceMatrix {
    let k = hubs.len();
    let mut hub_index = vec![u32::MAX; g.node_count()];
    for (i, &h) in hubs.iter().enumerate() {
        hub_index[h as usize] = i as u32;
    }
    let rows: Vec<Vec<Distance>> = hubs
        .par_chunks(BATCH)
        .map(|chunk| batch_rows(g, &hub_index, k, chunk))
        .collect();
    let labels = hubs.iter().map(|&h| g.label(h).to_owned()).collect();
    DistanceMatrix::from_rows(labels, rows.concat())
}

fn batch_rows(g: &Graph, hub_index: &[u32], k: usize, sources: &[NodeId]) -> Vec<Distance> {
    let n = g.node_count();
    let mut rows = vec![D_INF; sources.len() * k];
    let mut seen: Vec<Lanes> = vec![[0; WORDS]; n];
    let mut frontier: Vec<Lanes> = vec![[0; WORDS]; n];
    let mut next: Vec<Lanes> = vec![[0; WORDS]; n];
    let mut active: Vec<NodeId> = Vec::new();
    for (b, &s) in sources.iter().enumerate() {
        let bit = 1u64 << (b % 64);
        if frontier[s as usize] == [0; WORDS] {
            active.push(s);
        }
        seen[s as usize][b / 64] |= bit;
        frontier[s as usize][b / 64] |= bit;
        rows[b * k + hub_index[s as usize] as usize] = 0;
    }
    let mut remaining = sources.len() * k - sources.len();
    let mut touched: Vec<NodeId> = Vec::new();
    let mut level: Distance = 0;
    while !active.is_empty() && remaining > 0 {
        level += 1;
        for &v in &active {
            let f = frontier[v as usize];
            for &u in g.neighbors(v) {
                let slot = &mut next[u as usize];
                if *slot == [0; WORDS] {
                    touched.push(u);
                }
                for w in 0..WORDS {
                    slot[w] |= f[w];
                }
            }
            frontier[v as usize] = [0; WORDS];
        }
        active.clear();
        for &u in &touched {
            let ui = u as usize;
            let mut fresh = [0u64; WORDS];
            let mut any = false;
            for w in 0..WORDS {
                fresh[w] = next[ui][w] & !seen[ui][w];
                seen[ui][w] |= fresh[w];
                any |= fresh[w] != 0;
            }
            next[ui] = [0; WORDS];
            if !any {
                continue;
            }
            frontier[ui] = fresh;
            active.push(u);
            let target = hub_index[ui];
            if target != u32::MAX {
                for (w, &word) in fresh.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = w * 64 + bits.trailing_zeros() as usize;
                        rows[b * k + target as usize] = level;
                        remaining -= 1;
                        bits &= bits - 1;
                    }
                }
            }
        }
        touched.clear();
    }
    rows
}
