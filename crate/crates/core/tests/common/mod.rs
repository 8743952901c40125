//! Independent reference implementations and graph generators shared by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use hocd::{load_edge_list, Graph, IdMode, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edges = Vec<(usize, usize)>;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load_data(name: &str) -> Graph {
    hocd::read_edge_list_file(&data_path(name), IdMode::Numeric).unwrap().graph
}

/// Graph over labels `0..n` from an edge list; nodes without edges disappear.
pub fn graph_from(edges: &[(usize, usize)]) -> Graph {
    let text: String = edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
    load_edge_list(text.as_bytes(), IdMode::Numeric).unwrap().graph
}

/// Plain adjacency lists indexed by external label.
pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Every connected labelled graph on `n` nodes.
pub fn all_connected(n: usize) -> Vec<Edges> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect::<Edges>()
        })
        .filter(|e| is_connected(n, e))
        .collect()
}

/// Connected random graphs on `n` nodes with edge probability `p`.
pub fn random_connected(n: usize, p: f64, count: usize, seed: u64) -> Vec<Edges> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e: Edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        if is_connected(n, &e) {
            out.push(e);
        }
    }
    out
}

/// Simple G(n, p) by testing every pair; isolated nodes are kept out of the edge list.
pub fn naive_er(n: usize, p: f64, seed: u64) -> Edges {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|_| rng.gen_bool(p))
        .collect()
}

/// Hubs by the literal definition on degrees: no neighbour larger, one smaller.
pub fn reference_hubs(adj: &[Vec<usize>]) -> Vec<usize> {
    (0..adj.len())
        .filter(|&i| {
            let d = adj[i].len();
            !adj[i].is_empty()
                && adj[i].iter().all(|&j| adj[j].len() <= d)
                && adj[i].iter().any(|&j| adj[j].len() < d)
        })
        .collect()
}

/// Reference end-communities: `x[s]` and `h[i]` as `(member, t)` lists.
#[derive(Debug, Clone)]
pub struct ReferencePropagation {
    pub hubs: Vec<usize>,
    pub x: Vec<Vec<(usize, u32)>>,
    pub h: Vec<Vec<(usize, u32)>>,
    pub t_fin: u32,
}

/// The propagation loop executed literally: for every step, every community,
/// every member that joined at the previous step, every lower neighbour.
pub fn reference_propagation(adj: &[Vec<usize>], t_max: u32) -> ReferencePropagation {
    let hubs = reference_hubs(adj);
    let mut x: Vec<Vec<(usize, u32)>> = hubs.iter().map(|&hub| vec![(hub, 0)]).collect();
    let mut h: Vec<Vec<(usize, u32)>> = vec![Vec::new(); adj.len()];
    for (s, &hub) in hubs.iter().enumerate() {
        h[hub].push((s, 0));
    }
    let mut t_fin = 0;
    for t in 1..=t_max {
        let mut changed = false;
        for s in 0..hubs.len() {
            let previous: Vec<usize> = x[s].iter().filter(|&&(_, tj)| tj == t - 1).map(|&(i, _)| i).collect();
            for i in previous {
                for &j in &adj[i] {
                    if adj[i].len() > adj[j].len() && !h[j].iter().any(|&(l, _)| l == s) {
                        x[s].push((j, t));
                        h[j].push((s, t));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
        t_fin = t;
    }
    ReferencePropagation { hubs, x, h, t_fin }
}

/// All-pairs hop counts; `None` when unreachable.
pub fn reference_distances(adj: &[Vec<usize>], from: usize) -> Vec<Option<u32>> {
    let mut d = vec![None; adj.len()];
    d[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if d[v].is_none() {
                d[v] = Some(d[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMerge {
    pub level: u32,
    pub left: String,
    pub right: String,
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct ReferenceHierarchy {
    pub merges: Vec<ReferenceMerge>,
    /// Surviving handles after each level, starting with level 0.
    pub levels: Vec<Vec<String>>,
    pub phi: Option<f64>,
    pub disconnected: bool,
}

fn jac(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    a.intersection(b).count() as f64 / a.union(b).count() as f64
}

/// Dense matrix reduction with max-linkage. Entries equal to the level are
/// taken in row-major order over the current ordering, rescanning after every
/// merge; the merged community goes to the end. Consistency is checked on the
/// matrices as they stand before the merge.
pub fn reference_hierarchy(
    labels: Vec<String>,
    sets: Vec<BTreeSet<usize>>,
    r0: Vec<Vec<Option<u32>>>,
) -> ReferenceHierarchy {
    let s_size = labels.len();
    let mut names = labels;
    let mut sets = sets;
    let mut r = r0;
    let eps_max = (0..s_size)
        .flat_map(|p| (0..s_size).filter(move |&q| q != p).map(move |q| (p, q)))
        .filter_map(|(p, q)| r[p][q])
        .max()
        .unwrap_or(0);
    let all_inf = |r: &Vec<Vec<Option<u32>>>| {
        r.len() > 1 && (0..r.len()).all(|p| (0..r.len()).all(|q| p == q || r[p][q].is_none()))
    };
    let far = |d: Option<u32>, eps: u32| d.is_none_or(|d| d > eps);

    let mut merges = Vec::new();
    let mut levels = vec![names.clone()];
    let mut disconnected = all_inf(&r);
    if !disconnected {
        for eps in 1..=eps_max {
            loop {
                let n = names.len();
                let hit = (0..n)
                    .flat_map(|p| (0..n).map(move |q| (p, q)))
                    .find(|&(p, q)| p != q && r[p][q] == Some(eps));
                let Some((p, q)) = hit else { break };
                let j = |a: usize, b: usize| jac(&sets[a], &sets[b]);
                let consistent = (0..n).filter(|&z| z != p && z != q).all(|z| {
                    !(far(r[p][z], eps) || far(r[q][z], eps)) || (j(p, q) > j(p, z) && j(p, q) > j(q, z))
                });
                merges.push(ReferenceMerge {
                    level: eps,
                    left: names[p].clone(),
                    right: names[q].clone(),
                    consistent,
                });
                let keep: Vec<usize> = (0..n).filter(|&z| z != p && z != q).collect();
                let mut next = vec![vec![None; keep.len() + 1]; keep.len() + 1];
                for (a, &za) in keep.iter().enumerate() {
                    for (b, &zb) in keep.iter().enumerate() {
                        next[a][b] = r[za][zb];
                    }
                    let d = match (r[p][za], r[q][za]) {
                        (Some(x), Some(y)) => Some(x.max(y)),
                        _ => None,
                    };
                    next[a][keep.len()] = d;
                    next[keep.len()][a] = d;
                }
                next[keep.len()][keep.len()] = Some(0);
                let merged_set: BTreeSet<usize> = sets[p].union(&sets[q]).copied().collect();
                let merged_name = format!("{}+{}", names[p], names[q]);
                names = keep.iter().map(|&z| names[z].clone()).chain([merged_name]).collect();
                sets = keep.iter().map(|&z| sets[z].clone()).chain([merged_set]).collect();
                r = next;
            }
            levels.push(names.clone());
            if all_inf(&r) {
                disconnected = true;
                break;
            }
        }
    }
    let good = merges.iter().filter(|m| m.consistent).count();
    let phi = (s_size > 2).then(|| good.saturating_sub(1) as f64 / (s_size - 2) as f64);
    ReferenceHierarchy { merges, levels, phi, disconnected }
}

/// Reference propagation plus reference hierarchy for a graph given by labels `0..n`.
pub fn reference_pipeline(n: usize, edges: &[(usize, usize)]) -> (ReferencePropagation, ReferenceHierarchy) {
    let adj = adjacency(n, edges);
    let prop = reference_propagation(&adj, n as u32);
    let labels = prop.hubs.iter().map(|h| h.to_string()).collect();
    let sets = prop.x.iter().map(|x| x.iter().map(|&(i, _)| i).collect()).collect();
    let r0 = prop
        .hubs
        .iter()
        .map(|&a| {
            let d = reference_distances(&adj, a);
            prop.hubs.iter().map(|&b| d[b]).collect()
        })
        .collect();
    let hier = reference_hierarchy(labels, sets, r0);
    (prop, hier)
}

/// Library membership as `{hub label: {(member label, t)}}`.
pub fn library_x(g: &Graph, state: &hocd::PropagationState) -> BTreeMap<String, BTreeSet<(String, u32)>> {
    state
        .hubs()
        .iter()
        .enumerate()
        .map(|(s, &hub)| {
            let members = state
                .community(s as u32)
                .iter()
                .map(|&(i, t)| (g.label(i).to_owned(), t))
                .collect();
            (g.label(hub).to_owned(), members)
        })
        .collect()
}

pub fn reference_x(prop: &ReferencePropagation) -> BTreeMap<String, BTreeSet<(String, u32)>> {
    prop.hubs
        .iter()
        .zip(&prop.x)
        .map(|(hub, x)| (hub.to_string(), x.iter().map(|&(i, t)| (i.to_string(), t)).collect()))
        .collect()
}

/// Library histories as `{node label: {(hub label, t)}}`, only non-empty ones.
pub fn library_h(g: &Graph, state: &hocd::PropagationState) -> BTreeMap<String, BTreeSet<(String, u32)>> {
    g.nodes()
        .filter(|&i| !state.history(i).is_empty())
        .map(|i| {
            let h = state
                .history(i)
                .iter()
                .map(|&(s, t)| (g.label(state.hubs()[s as usize]).to_owned(), t))
                .collect();
            (g.label(i).to_owned(), h)
        })
        .collect()
}

pub fn reference_h(prop: &ReferencePropagation) -> BTreeMap<String, BTreeSet<(String, u32)>> {
    prop.h
        .iter()
        .enumerate()
        .filter(|(_, h)| !h.is_empty())
        .map(|(i, h)| (i.to_string(), h.iter().map(|&(s, t)| (prop.hubs[s].to_string(), t)).collect()))
        .collect()
}

/// Two disjoint copies of `g`; the second copy's labels get a `b` prefix.
pub fn two_copies(g: &Graph) -> Graph {
    let mut text = String::new();
    for (u, v) in g.edges() {
        text.push_str(&format!("a{} a{}\n", g.label(u), g.label(v)));
        text.push_str(&format!("b{} b{}\n", g.label(u), g.label(v)));
    }
    load_edge_list(text.as_bytes(), IdMode::Text).unwrap().graph
}

pub fn node(g: &Graph, label: &str) -> NodeId {
    g.find(label).unwrap_or_else(|| panic!("no node {label}"))
}
