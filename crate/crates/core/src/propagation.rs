//! Synchronised downhill label propagation from every hub.
//!
//! Each hub seeds one end-community at time 0. At step `t`, every node that
//! joined community `s` at `t - 1` passes `s` to each neighbour with strictly
//! lower centrality that does not carry `s` yet. Step `t` reads only the state
//! left by step `t - 1`: candidate infections are collected per community,
//! merged in `(node, community)` order and then applied, so the result does
//! not depend on scheduling.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::centrality::CentralityVector;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::roles::RoleAssignment;

/// Index of an end-community; community `k` is seeded by the `k`-th hub.
pub type CommunityId = u32;
/// Propagation step counter.
pub type Step = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationState {
    hubs: Vec<NodeId>,
    /// `communities[s]`: `(node, join step)` in join order.
    communities: Vec<Vec<(NodeId, Step)>>,
    /// `histories[i]`: `(community, receive step)` in receive order.
    histories: Vec<Vec<(CommunityId, Step)>>,
    t_fin: Step,
    t_max: Step,
    truncated: bool,
    infections_per_step: Vec<usize>,
}

impl PropagationState {
    pub fn hubs(&self) -> &[NodeId] {
        &self.hubs
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn community(&self, s: CommunityId) -> &[(NodeId, Step)] {
        &self.communities[s as usize]
    }

    pub fn communities(&self) -> &[Vec<(NodeId, Step)>] {
        &self.communities
    }

    pub fn history(&self, node: NodeId) -> &[(CommunityId, Step)] {
        &self.histories[node as usize]
    }

    pub fn histories(&self) -> &[Vec<(CommunityId, Step)>] {
        &self.histories
    }

    /// Sorted member list of community `s`.
    pub fn community_nodes(&self, s: CommunityId) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self.communities[s as usize].iter().map(|&(i, _)| i).collect();
        nodes.sort_unstable();
        nodes
    }

    /// Last step at which any infection happened.
    pub fn t_fin(&self) -> Step {
        self.t_fin
    }

    pub fn t_max(&self) -> Step {
        self.t_max
    }

    /// Set when the step cap stopped propagation while infections were still pending.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// New `(node, community)` memberships created at steps `1..=t_fin`.
    pub fn infections_per_step(&self) -> &[usize] {
        &self.infections_per_step
    }

    /// Total number of membership tuples, equal in `X` and `H`.
    pub fn membership_count(&self) -> usize {
        self.histories.iter().map(Vec::len).sum()
    }

    /// `{"communities": {hub: [[node, t], ...]}, "histories": {node: [[hub, t], ...]}}`
    /// keyed by external ids.
    pub fn to_json(&self, g: &Graph) -> Value {
        let hub_label = |s: CommunityId| g.label(self.hubs[s as usize]).to_owned();
        let mut communities = Map::new();
        for (s, members) in self.communities.iter().enumerate() {
            let rows: Vec<Value> = members.iter().map(|&(i, t)| json!([g.label(i), t])).collect();
            communities.insert(hub_label(s as CommunityId), Value::Array(rows));
        }
        let mut histories = Map::new();
        for (i, history) in self.histories.iter().enumerate() {
            let rows: Vec<Value> = history.iter().map(|&(s, t)| json!([hub_label(s), t])).collect();
            histories.insert(g.label(i as NodeId).to_owned(), Value::Array(rows));
        }
        json!({ "communities": communities, "histories": histories })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapMetrics {
    /// Mean number of communities per node.
    pub m_h: f64,
    /// Mean number of nodes per end-community.
    pub m_x: f64,
    pub memberships: usize,
    pub nodes: usize,
    pub communities: usize,
}

pub fn propagate(
    g: &Graph,
    c: &CentralityVector,
    roles: &RoleAssignment,
    t_max: Step,
) -> Result<PropagationState> {
    propagate_timed(g, c, roles, t_max).map(|(state, _)| state)
}

/// Like [`propagate`], also returning the cumulative wall-clock time at the end
/// of each infecting step (one entry per step up to `t_fin`).
pub fn propagate_timed(
    g: &Graph,
    c: &CentralityVector,
    roles: &RoleAssignment,
    t_max: Step,
) -> Result<(PropagationState, Vec<Duration>)> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("t_max must be at least 1".into()));
    }
    let start = Instant::now();
    let hubs = roles.hubs().to_vec();
    let mut communities: Vec<Vec<(NodeId, Step)>> = hubs.iter().map(|&h| vec![(h, 0)]).collect();
    let mut histories: Vec<Vec<(CommunityId, Step)>> = vec![Vec::new(); g.node_count()];
    for (s, &h) in hubs.iter().enumerate() {
        histories[h as usize].push((s as CommunityId, 0));
    }
    // communities[s][frontier[s]..] joined at the previous step
    let mut frontier = vec![0usize; hubs.len()];
    let mut infections_per_step = Vec::new();
    let mut elapsed = Vec::new();
    let mut t_fin = 0;
    let mut truncated = false;

    for t in 1..=t_max {
        let mut infections = next_infections(g, c, &communities, &frontier, &histories);
        if infections.is_empty() {
            break;
        }
        for (s, members) in communities.iter().enumerate() {
            frontier[s] = members.len();
        }
        infections.sort_unstable();
        for &(node, s) in &infections {
            histories[node as usize].push((s, t));
            communities[s as usize].push((node, t));
        }
        infections_per_step.push(infections.len());
        elapsed.push(start.elapsed());
        t_fin = t;
        if t == t_max {
            truncated = !next_infections(g, c, &communities, &frontier, &histories).is_empty();
        }
    }

    Ok((
        PropagationState {
            hubs,
            communities,
            histories,
            t_fin,
            t_max,
            truncated,
            infections_per_step,
        },
        elapsed,
    ))
}

/// Deduplicated `(node, community)` infections the next step would perform.
fn next_infections(
    g: &Graph,
    c: &CentralityVector,
    communities: &[Vec<(NodeId, Step)>],
    frontier: &[usize],
    histories: &[Vec<(CommunityId, Step)>],
) -> Vec<(NodeId, CommunityId)> {
    communities
        .par_iter()
        .enumerate()
        .flat_map_iter(|(s, members)| {
            let s = s as CommunityId;
            let mut found: Vec<(NodeId, CommunityId)> = Vec::new();
            for &(i, _) in &members[frontier[s as usize]..] {
                for &j in g.neighbors(i) {
                    if c.compare(i, j) == Ordering::Greater
                        && !histories[j as usize].iter().any(|&(l, _)| l == s)
                    {
                        found.push((j, s));
                    }
                }
            }
            found.sort_unstable();
            found.dedup();
            found
        })
        .collect()
}

pub fn overlap_metrics(state: &PropagationState, g: &Graph) -> Result<OverlapMetrics> {
    let communities = state.community_count();
    if communities == 0 {
        return Err(Error::NoHubs);
    }
    let memberships = state.membership_count();
    let in_x: usize = state.communities.iter().map(Vec::len).sum();
    assert_eq!(memberships, in_x, "X and H must hold the same tuples");
    let nodes = g.node_count();
    Ok(OverlapMetrics {
        m_h: memberships as f64 / nodes as f64,
        m_x: memberships as f64 / communities as f64,
        memberships,
        nodes,
        communities,
    })
}

/// A node's communities, strongest (earliest) first; ties by community id.
pub fn membership_strength(state: &PropagationState, node: NodeId) -> Vec<(CommunityId, Step)> {
    let mut h = state.history(node).to_vec();
    h.sort_unstable_by_key(|&(s, t)| (t, s));
    h
}
