//! Community hierarchy by iterative reduction of the hub distance matrix, with
//! Jaccard-based consistency scoring of every merge.
//!
//! Levels run `ε = 1, 2, …, ε_max`. Within a level the first entry equal to `ε`
//! in row-major order over the current community ordering is merged, then the
//! scan restarts from the top. The merged community replaces its two children
//! and is appended at the end of the ordering; its distance to any survivor is
//! the larger of the children's distances (max linkage).
//!
//! A merge of `p` and `q` is J-D consistent when every survivor `z` that will not
//! join them at this level (`r_pz > r_pq` or `r_qz > r_pq`) overlaps both `p` and
//! `q` strictly less than they overlap each other.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use serde::{Deserialize, Serialize};

use crate::distance::{Distance, DistanceMatrix, D_INF};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::jaccard::{JaccardMatrix, Overlap};
use crate::propagation::{CommunityId, PropagationState};

/// Identifier of a community anywhere in the hierarchy. Ids below `|S|` are
/// end-communities; merged communities get the following ids in creation order.
pub type HandleId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub level: Distance,
    pub left: HandleId,
    pub right: HandleId,
    pub merged: HandleId,
    pub jd_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierCommunity {
    pub id: HandleId,
    /// End-communities beneath this community, ascending.
    pub end_communities: Vec<CommunityId>,
    /// Union of the end-communities' members, ascending.
    pub nodes: Vec<NodeId>,
}

/// Surviving communities once all merges at `level` are done.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub level: Distance,
    pub communities: Vec<HierCommunity>,
}

/// One point of the `ε ↔ |R_ε|`, `ε ↔ Δ|R_ε|` and `ε ↔ Φ_ε` curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub level: Distance,
    pub size: usize,
    pub delta: usize,
    pub consistent: usize,
    /// Share of this level's merges that were J-D consistent; `None` without merges.
    pub phi_level: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityHierarchy {
    end_labels: Vec<String>,
    /// `(left, right)` of every merged handle, indexed by `id - |S|`.
    children: Vec<(HandleId, HandleId)>,
    eps_max: Option<Distance>,
    merge_events: Vec<MergeEvent>,
    /// `levels[0]` holds the end-communities, `levels[k]` the survivors of level `k`.
    levels: Vec<Level>,
    curve: Vec<CurvePoint>,
    truncated_by_disconnection: bool,
}

impl CommunityHierarchy {
    pub fn end_community_count(&self) -> usize {
        self.end_labels.len()
    }

    /// Largest finite hub-to-hub distance, `None` when no two hubs are connected.
    pub fn eps_max(&self) -> Option<Distance> {
        self.eps_max
    }

    pub fn merge_events(&self) -> &[MergeEvent] {
        &self.merge_events
    }

    pub fn consistent_merges(&self) -> usize {
        self.merge_events.iter().filter(|e| e.jd_consistent).count()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Communities present at aggregation level `eps`.
    pub fn level(&self, eps: Distance) -> Option<&Level> {
        self.levels.get(eps as usize)
    }

    pub fn top(&self) -> &Level {
        self.levels.last().expect("at least the end-community level")
    }

    pub fn curve(&self) -> &[CurvePoint] {
        &self.curve
    }

    pub fn truncated_by_disconnection(&self) -> bool {
        self.truncated_by_disconnection
    }

    /// Direct children of a merged handle.
    pub fn children(&self, id: HandleId) -> Option<(HandleId, HandleId)> {
        let s = self.end_labels.len() as HandleId;
        id.checked_sub(s).and_then(|k| self.children.get(k as usize).copied())
    }

    /// `p+q` style name built from the hub labels beneath `id`.
    pub fn handle(&self, id: HandleId) -> String {
        match self.children(id) {
            None => self.end_labels[id as usize].clone(),
            Some((l, r)) => format!("{}+{}", self.handle(l), self.handle(r)),
        }
    }

    /// `R_ε` recomputed from `R_0`: with max linkage, the distance between two
    /// communities is the largest `R_0` entry between their end-communities.
    pub fn distance_matrix_at(&self, eps: Distance, r0: &DistanceMatrix) -> Option<DistanceMatrix> {
        let level = self.level(eps)?;
        let k = level.communities.len();
        let mut data = vec![0; k * k];
        for (a, ca) in level.communities.iter().enumerate() {
            for (b, cb) in level.communities.iter().enumerate() {
                if a != b {
                    data[a * k + b] = ca
                        .end_communities
                        .iter()
                        .flat_map(|&x| cb.end_communities.iter().map(move |&y| (x, y)))
                        .map(|(x, y)| r0.get(x as usize, y as usize))
                        .max()
                        .unwrap_or(D_INF);
                }
            }
        }
        let labels = level.communities.iter().map(|c| self.handle(c.id)).collect();
        Some(DistanceMatrix::from_rows(labels, data))
    }

    /// `J_ε` over the communities present at level `eps`.
    pub fn jaccard_matrix_at(&self, eps: Distance) -> Option<JaccardMatrix> {
        let level = self.level(eps)?;
        let labels = level.communities.iter().map(|c| self.handle(c.id)).collect();
        let sets: Vec<Vec<NodeId>> = level.communities.iter().map(|c| c.nodes.clone()).collect();
        JaccardMatrix::from_sets(labels, &sets).ok()
    }
}

/// Shared J-D test: `others` yields `(r_pz, r_qz, j_pz, j_qz)` for every other survivor.
fn jd_condition<I>(eps: Distance, pq: Overlap, others: I) -> bool
where
    I: IntoIterator<Item = (Distance, Distance, Overlap, Overlap)>,
{
    others
        .into_iter()
        .all(|(pz, qz, j_pz, j_qz)| !(pz > eps || qz > eps) || (pq > j_pz && pq > j_qz))
}

/// J-D consistency of merging rows `p` and `q` of the current stage matrices.
pub fn jd_consistent(p: usize, q: usize, r: &DistanceMatrix, j: &JaccardMatrix) -> bool {
    let eps = r.get(p, q);
    let others = (0..r.size())
        .filter(|&z| z != p && z != q)
        .map(|z| (r.get(p, z), r.get(q, z), j.overlap(p, z), j.overlap(q, z)));
    jd_condition(eps, j.overlap(p, q), others)
}

/// Consistency factor; `applicable` is false when there are at most two
/// end-communities, in which case `value` is 1 by convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiScore {
    pub value: f64,
    pub applicable: bool,
}

impl PhiScore {
    pub fn applicable_value(&self) -> Option<f64> {
        self.applicable.then_some(self.value)
    }
}

/// `(consistent merges − 1) / (|S| − 2)` for `|S| > 2`.
pub fn phi(h: &CommunityHierarchy, s_size: usize) -> PhiScore {
    if s_size <= 2 {
        return PhiScore { value: 1.0, applicable: false };
    }
    let good = h.consistent_merges().saturating_sub(1);
    PhiScore {
        value: good as f64 / (s_size - 2) as f64,
        applicable: true,
    }
}

/// Mutable merge state. Slots are indices into the initial `|S|` rows; a merge
/// reuses the left child's slot and retires the right child's.
///
/// Under max-linkage the distance between two survivors is the largest
/// distance between their end-communities, and no surviving pair is closer
/// than the current level. A pair therefore sits exactly at level `eps` once
/// every one of its end-community pairs is within `eps`; `within` counts those
/// pairs, fed one distance bucket of `R_0` per level. Overlaps are kept
/// sparsely as shared-node counts, since most pairs share no node.
struct Builder {
    n: usize,
    /// End-community pairs `(a, b)`, `a < b`, grouped by finite distance.
    pairs: Vec<(u32, u32)>,
    bucket_start: Vec<usize>,
    slot_of: Vec<u32>,
    /// `within[a][b]`: end-community pairs across slots `a`, `b` within the current level.
    within: Vec<FxHashMap<u32, u64>>,
    /// Survivors at exactly the current level, keyed by `(order, slot)`.
    near: Vec<BTreeSet<(u64, u32)>>,
    /// `shared[a][b]`: nodes common to slots `a` and `b`, present only when non-zero.
    shared: Vec<FxHashMap<u32, u32>>,
    /// Connected component of each slot; merges never cross components.
    component: Vec<u32>,
    component_alive: Vec<usize>,
    /// Components holding at least two survivors.
    crowded: usize,
    alive: Vec<bool>,
    alive_count: usize,
    order: Vec<u64>,
    next_order: u64,
    ids: Vec<HandleId>,
    next_id: HandleId,
    ends: Vec<Vec<CommunityId>>,
    nodes: Vec<Vec<NodeId>>,
    /// Slots containing each node.
    node_slots: Vec<Vec<u32>>,
}

impl Builder {
    fn new(state: &PropagationState, r0: &DistanceMatrix, eps_max: Distance) -> Self {
        let n = r0.size();
        let top = eps_max as usize;
        let mut bucket_start = vec![0usize; top + 2];
        let mut component = vec![0u32; n];
        for a in 0..n {
            let row = r0.row(a);
            component[a] = row.iter().position(|&d| d != D_INF).unwrap_or(a) as u32;
            for &d in &row[a + 1..] {
                if d != D_INF {
                    bucket_start[d as usize + 1] += 1;
                }
            }
        }
        for d in 1..bucket_start.len() {
            bucket_start[d] += bucket_start[d - 1];
        }
        let mut fill = bucket_start.clone();
        let mut pairs = vec![(0u32, 0u32); bucket_start[top + 1]];
        for a in 0..n {
            for (b, &d) in r0.row(a).iter().enumerate().skip(a + 1) {
                if d != D_INF {
                    pairs[fill[d as usize]] = (a as u32, b as u32);
                    fill[d as usize] += 1;
                }
            }
        }
        let mut component_alive = vec![0usize; n];
        for &c in &component {
            component_alive[c as usize] += 1;
        }
        let crowded = component_alive.iter().filter(|&&k| k > 1).count();

        let nodes: Vec<Vec<NodeId>> = (0..n as CommunityId).map(|s| state.community_nodes(s)).collect();
        let node_slots: Vec<Vec<u32>> = state
            .histories()
            .iter()
            .map(|h| h.iter().map(|&(s, _)| s).collect())
            .collect();
        let mut b = Builder {
            n,
            pairs,
            bucket_start,
            slot_of: (0..n as u32).collect(),
            within: vec![FxHashMap::default(); n],
            near: vec![BTreeSet::new(); n],
            shared: vec![FxHashMap::default(); n],
            component,
            component_alive,
            crowded,
            alive: vec![true; n],
            alive_count: n,
            order: (0..n as u64).collect(),
            next_order: n as u64,
            ids: (0..n as HandleId).collect(),
            next_id: n as HandleId,
            ends: (0..n as CommunityId).map(|s| vec![s]).collect(),
            nodes,
            node_slots,
        };
        for s in 0..n {
            b.shared[s] = b.count_shared(s);
        }
        b
    }

    /// Shared-node counts between slot `p` and every other slot it overlaps.
    fn count_shared(&self, p: usize) -> FxHashMap<u32, u32> {
        let mut counts: FxHashMap<u32, u32> = FxHashMap::default();
        for &v in &self.nodes[p] {
            for &z in &self.node_slots[v as usize] {
                if z as usize != p {
                    *counts.entry(z).or_insert(0) += 1;
                }
            }
        }
        counts
    }

    #[inline]
    fn overlap(&self, a: usize, b: usize) -> Overlap {
        let shared = self.shared[a].get(&(b as u32)).copied().unwrap_or(0);
        let union = (self.nodes[a].len() + self.nodes[b].len()) as u32 - shared;
        Overlap::new(shared, union)
    }

    #[inline]
    fn key(&self, z: usize) -> (u64, u32) {
        (self.order[z], z as u32)
    }

    fn disconnected(&self) -> bool {
        self.alive_count > 1 && self.crowded == 0
    }

    /// Adds the end-community pairs at distance `eps` and collects the
    /// survivor pairs that become complete.
    fn open_level(&mut self, eps: Distance) {
        let range = self.bucket_start[eps as usize]..self.bucket_start[eps as usize + 1];
        let mut keys: Vec<u64> = self.pairs[range]
            .iter()
            .filter_map(|&(a, b)| {
                let (x, y) = (self.slot_of[a as usize], self.slot_of[b as usize]);
                (x != y).then(|| (x.min(y) as u64) << 32 | x.max(y) as u64)
            })
            .collect();
        keys.sort_unstable();
        for run in keys.chunk_by(|a, b| a == b) {
            let (x, y) = ((run[0] >> 32) as usize, (run[0] & 0xffff_ffff) as usize);
            let count = self.within[x].entry(y as u32).or_insert(0);
            *count += run.len() as u64;
            let count = *count;
            self.within[y].insert(x as u32, count);
            if count == (self.ends[x].len() * self.ends[y].len()) as u64 {
                let (kx, ky) = (self.key(x), self.key(y));
                self.near[x].insert(ky);
                self.near[y].insert(kx);
            }
        }
    }

    fn survivors(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (0..self.n).filter(|&i| self.alive[i]).collect();
        s.sort_unstable_by_key(|&i| self.order[i]);
        s
    }

    fn snapshot(&self, level: Distance) -> Level {
        Level {
            level,
            communities: self
                .survivors()
                .into_iter()
                .map(|i| HierCommunity {
                    id: self.ids[i],
                    end_communities: sorted(&self.ends[i]),
                    nodes: sorted(&self.nodes[i]),
                })
                .collect(),
        }
    }

    /// J-D test for merging `p` and `q`, where `common` are the survivors at
    /// the current level from both. A survivor sharing no node with `p` or `q`
    /// has zero overlap with both, so it can only fail the test when `p` and
    /// `q` share nothing either; otherwise only overlapping survivors matter.
    fn consistent(&self, p: usize, q: usize, common: &BTreeSet<(u64, u32)>) -> bool {
        let pq = self.overlap(p, q);
        if pq.shared == 0 {
            return common.len() == self.alive_count - 2;
        }
        self.shared[p]
            .keys()
            .chain(self.shared[q].keys())
            .map(|&z| z as usize)
            .filter(|&z| z != p && z != q && !common.contains(&self.key(z)))
            .all(|z| pq > self.overlap(p, z) && pq > self.overlap(q, z))
    }

    /// Runs every merge of level `eps`; returns `(merges, consistent)`.
    fn run_level(
        &mut self,
        eps: Distance,
        events: &mut Vec<MergeEvent>,
        children: &mut Vec<(HandleId, HandleId)>,
    ) -> (usize, usize) {
        self.open_level(eps);
        let mut ready: BTreeSet<(u64, u32)> = (0..self.n)
            .filter(|&a| self.alive[a] && !self.near[a].is_empty())
            .map(|a| self.key(a))
            .collect();

        let (mut merges, mut good) = (0, 0);
        while let Some(&(_, p)) = ready.first() {
            let p = p as usize;
            let &(_, q) = self.near[p].first().expect("ready row has a pair at this level");
            let q = q as usize;
            let common: BTreeSet<(u64, u32)> = self.near[p].intersection(&self.near[q]).copied().collect();
            let ok = self.consistent(p, q, &common);

            let (kp, kq) = (self.key(p), self.key(q));
            ready.remove(&kp);
            ready.remove(&kq);
            let near_p = std::mem::take(&mut self.near[p]);
            let near_q = std::mem::take(&mut self.near[q]);
            for &(_, z) in near_p.iter().chain(&near_q) {
                let z = z as usize;
                if z == p || z == q {
                    continue;
                }
                let row = &mut self.near[z];
                row.remove(&kp);
                row.remove(&kq);
                if row.is_empty() {
                    ready.remove(&self.key(z));
                }
            }

            let merged = self.next_id;
            events.push(MergeEvent {
                level: eps,
                left: self.ids[p],
                right: self.ids[q],
                merged,
                jd_consistent: ok,
            });
            children.push((self.ids[p], self.ids[q]));

            // the merged community lives in the slot of the larger child
            let (keep, gone) = if self.nodes[q].len() > self.nodes[p].len() { (q, p) } else { (p, q) };
            self.alive[gone] = false;
            self.alive_count -= 1;
            let c = self.component[keep] as usize;
            self.component_alive[c] -= 1;
            if self.component_alive[c] == 1 {
                self.crowded -= 1;
            }
            self.absorb(keep, gone);
            self.ids[keep] = merged;
            self.next_id += 1;
            self.order[keep] = self.next_order;
            self.next_order += 1;

            let k = self.key(keep);
            for &(order, z) in &common {
                self.near[z as usize].insert(k);
                ready.insert((order, z));
            }
            if !common.is_empty() {
                ready.insert(k);
            }
            self.near[keep] = common;
            merges += 1;
            good += ok as usize;
        }
        (merges, good)
    }

    /// Moves slot `gone`'s members and end-communities into slot `keep` and
    /// updates the pair and overlap counts of the merged community.
    fn absorb(&mut self, keep: usize, gone: usize) {
        let (k32, g32) = (keep as u32, gone as u32);
        // nodes already in both children, counted per other slot holding them
        let mut triple: FxHashMap<u32, u32> = FxHashMap::default();
        for v in std::mem::take(&mut self.nodes[gone]) {
            let slots = &mut self.node_slots[v as usize];
            let in_keep = slots.contains(&k32);
            if in_keep {
                for &z in slots.iter().filter(|&&z| z != k32 && z != g32) {
                    *triple.entry(z).or_insert(0) += 1;
                }
            }
            slots.retain(|&z| z != g32);
            if !in_keep {
                slots.push(k32);
                self.nodes[keep].push(v);
            }
        }
        for e in std::mem::take(&mut self.ends[gone]) {
            self.slot_of[e as usize] = k32;
            self.ends[keep].push(e);
        }

        let mut within = std::mem::take(&mut self.within[keep]);
        within.remove(&g32);
        for (z, count) in std::mem::take(&mut self.within[gone]) {
            if z == k32 {
                continue;
            }
            let total = within.entry(z).or_insert(0);
            *total += count;
            let row = &mut self.within[z as usize];
            row.remove(&g32);
            row.insert(k32, *total);
        }
        self.within[keep] = within;

        let mut shared = std::mem::take(&mut self.shared[keep]);
        shared.remove(&g32);
        let from_gone = std::mem::take(&mut self.shared[gone]);
        for (&z, &count) in &from_gone {
            if z != k32 {
                *shared.entry(z).or_insert(0) += count;
                self.shared[z as usize].remove(&g32);
            }
        }
        for (&z, &count) in &triple {
            *shared.get_mut(&z).expect("triple overlap implies overlap") -= count;
        }
        for &z in from_gone.keys().chain(triple.keys()) {
            if z != k32 {
                self.shared[z as usize].insert(k32, shared[&z]);
            }
        }
        self.shared[keep] = shared;
    }
}

fn sorted<T: Ord + Copy>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.sort_unstable();
    out
}

pub fn build_hierarchy(state: &PropagationState, r0: &DistanceMatrix) -> Result<CommunityHierarchy> {
    let n = r0.size();
    if n == 0 {
        return Err(Error::EmptyHierarchy);
    }
    if n != state.community_count() {
        return Err(Error::InvalidArgument(format!(
            "distance matrix has {n} rows but propagation produced {} communities",
            state.community_count()
        )));
    }
    let eps_max = r0.eps_max();
    let mut b = Builder::new(state, r0, eps_max.unwrap_or(0));
    let mut merge_events = Vec::new();
    let mut children = Vec::new();
    let mut levels = vec![b.snapshot(0)];
    let mut curve = Vec::new();

    let mut truncated = b.disconnected();
    if !truncated {
        for eps in 1..=eps_max.unwrap_or(0) {
            let (merges, good) = b.run_level(eps, &mut merge_events, &mut children);
            let snap = b.snapshot(eps);
            let size = snap.communities.len();
            curve.push(CurvePoint {
                level: eps,
                size,
                delta: merges,
                consistent: good,
                phi_level: (merges > 0).then(|| good as f64 / merges as f64),
            });
            levels.push(snap);
            if b.disconnected() {
                truncated = true;
                break;
            }
        }
    }

    Ok(CommunityHierarchy {
        end_labels: r0.labels().to_vec(),
        children,
        eps_max,
        merge_events,
        levels,
        curve,
        truncated_by_disconnection: truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffSignal {
    /// `Δ|R_ε| > 0` followed by `Δ|R_{ε+1}| = 0`.
    Plateau,
    /// `Φ_ε` strictly above its neighbouring defined values.
    PhiPeak,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoff {
    pub level: Distance,
    pub communities: usize,
    pub signal: CutoffSignal,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CutoffSuggestions {
    pub cutoffs: Vec<Cutoff>,
    /// Why the list is empty, when it is.
    pub note: Option<String>,
}

pub fn suggest_cutoffs(h: &CommunityHierarchy) -> CutoffSuggestions {
    suggest_from_curve(h.curve())
}

/// Cutoff candidates from a curve ordered by level.
pub fn suggest_from_curve(curve: &[CurvePoint]) -> CutoffSuggestions {
    if curve.len() < 2 {
        return CutoffSuggestions {
            cutoffs: Vec::new(),
            note: Some("hierarchy has fewer than two levels".into()),
        };
    }
    let plateau = |k: usize| k + 1 < curve.len() && curve[k].delta > 0 && curve[k + 1].delta == 0;

    let defined: Vec<(usize, f64)> = curve
        .iter()
        .enumerate()
        .filter_map(|(k, p)| p.phi_level.map(|v| (k, v)))
        .collect();
    let mut peak = vec![false; curve.len()];
    if defined.len() >= 2 {
        for (m, &(k, v)) in defined.iter().enumerate() {
            let left = m.checked_sub(1).map(|l| defined[l].1);
            let right = defined.get(m + 1).map(|r| r.1);
            peak[k] = left.is_none_or(|l| v > l) && right.is_none_or(|r| v > r);
        }
    }

    let cutoffs: Vec<Cutoff> = curve
        .iter()
        .enumerate()
        .filter_map(|(k, p)| {
            let signal = match (plateau(k), peak[k]) {
                (true, true) => CutoffSignal::Both,
                (true, false) => CutoffSignal::Plateau,
                (false, true) => CutoffSignal::PhiPeak,
                (false, false) => return None,
            };
            Some(Cutoff {
                level: p.level,
                communities: p.size,
                signal,
            })
        })
        .collect();
    let note = cutoffs
        .is_empty()
        .then(|| "no plateau on the level-size curve and no strict peak of the per-level consistency".to_owned());
    CutoffSuggestions { cutoffs, note }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::degree_centrality;
    use crate::distance::hub_distances;
    use crate::graph::{load_edge_list, Graph, IdMode};
    use crate::propagation::propagate;
    use crate::roles::classify_roles;

    fn pipeline(text: &str) -> (Graph, PropagationState, DistanceMatrix, CommunityHierarchy) {
        let g = load_edge_list(text.as_bytes(), IdMode::Numeric).unwrap().graph;
        let c = degree_centrality(&g);
        let roles = classify_roles(&g, &c);
        let state = propagate(&g, &c, &roles, g.node_count() as u32).unwrap();
        let r0 = hub_distances(&g, roles.hubs());
        let h = build_hierarchy(&state, &r0).unwrap();
        (g, state, r0, h)
    }

    /// Propagation over disjoint 3-node stars: one end-community per star.
    fn three_stars() -> PropagationState {
        let g = load_edge_list("0 1\n0 2\n3 4\n3 5\n6 7\n6 8".as_bytes(), IdMode::Numeric)
            .unwrap()
            .graph;
        let c = degree_centrality(&g);
        let roles = classify_roles(&g, &c);
        propagate(&g, &c, &roles, 10).unwrap()
    }

    #[test]
    fn three_community_max_rule() {
        let state = three_stars();
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let r0 = DistanceMatrix::from_rows(labels, vec![0, 1, 2, 1, 0, 3, 2, 3, 0]);
        let h = build_hierarchy(&state, &r0).unwrap();
        assert_eq!(h.eps_max(), Some(3));
        let first = &h.merge_events()[0];
        assert_eq!((first.level, first.left, first.right), (1, 0, 1));
        let r1 = h.distance_matrix_at(1, &r0).unwrap();
        assert_eq!(r1.labels(), &["c", "a+b"]);
        assert_eq!(r1.row(0), &[0, 3]);
        assert_eq!(r1.row(1), &[3, 0]);
        // level 2 has nothing to merge, level 3 finishes
        assert_eq!(h.curve()[1].delta, 0);
        assert_eq!(h.top().communities.len(), 1);
        assert_eq!(h.handle(h.top().communities[0].id), "c+a+b");
        assert!(!h.truncated_by_disconnection());
    }

    #[test]
    fn single_end_community() {
        let (_, _, _, h) = pipeline("0 1\n0 2\n0 3");
        assert!(h.merge_events().is_empty());
        assert_eq!(h.levels().len(), 1);
        assert_eq!(phi(&h, 1), PhiScore { value: 1.0, applicable: false });
    }

    #[test]
    fn empty_is_an_error() {
        let (_, state, r0, _) = pipeline("0 1\n0 2");
        let empty = DistanceMatrix::from_rows(Vec::new(), Vec::new());
        assert!(matches!(build_hierarchy(&state, &empty), Err(Error::EmptyHierarchy)));
        assert_eq!(r0.size(), 1);
    }

    #[test]
    fn jd_vacuous_with_two() {
        let r = DistanceMatrix::from_rows(vec!["a".into(), "b".into()], vec![0, 4, 4, 0]);
        let j = JaccardMatrix::from_sets(vec!["a".into(), "b".into()], &[vec![1], vec![2]]).unwrap();
        assert!(jd_consistent(0, 1, &r, &j));
    }

    #[test]
    fn jd_direct_violation() {
        // j_pq = 0.5, j_pz = 0.6 and z sits farther away
        let labels: Vec<String> = vec!["p".into(), "q".into(), "z".into()];
        let p: Vec<NodeId> = vec![1, 2, 3, 4, 5, 6];
        let q: Vec<NodeId> = vec![1, 2, 3, 4, 7, 8];
        let z: Vec<NodeId> = vec![1, 2, 3, 4, 5, 6, 9, 10, 11, 12];
        let j = JaccardMatrix::from_sets(labels.clone(), &[p, q, z]).unwrap();
        assert_eq!(j.get(0, 1), 0.5);
        assert_eq!(j.get(0, 2), 0.6);
        let r = DistanceMatrix::from_rows(labels, vec![0, 1, 2, 1, 0, 2, 2, 2, 0]);
        assert!(!jd_consistent(0, 1, &r, &j));
        // same overlaps but z merges with them at this level: exempt
        let r_same = DistanceMatrix::from_rows(
            j.labels().to_vec(),
            vec![0, 1, 1, 1, 0, 1, 1, 1, 0],
        );
        assert!(jd_consistent(0, 1, &r_same, &j));
    }

    #[test]
    fn phi_formula() {
        let (_, _, _, h) = pipeline("0 1\n0 2\n0 3");
        let mut fake = h.clone();
        fake.merge_events = (0..9)
            .map(|k| MergeEvent {
                level: 1,
                left: 0,
                right: 0,
                merged: 0,
                jd_consistent: k == 8,
            })
            .collect();
        assert_eq!(phi(&fake, 10).value, 0.0);
        for e in fake.merge_events.iter_mut() {
            e.jd_consistent = true;
        }
        assert_eq!(phi(&fake, 10).value, 1.0);
        assert!(!phi(&fake, 2).applicable);
    }

    #[test]
    fn two_components_stop_early() {
        // two stars joined to nothing; each has one hub
        let (_, _, r0, h) = pipeline("0 1\n0 2\n0 3\n10 11\n10 12\n10 13");
        assert_eq!(r0.get(0, 1), D_INF);
        assert!(h.truncated_by_disconnection());
        assert_eq!(h.top().communities.len(), 2);
        assert!(h.merge_events().is_empty());
    }

    #[test]
    fn union_and_lineage() {
        let text = "0 1\n0 2\n0 3\n0 4\n4 5\n5 6\n6 7\n6 8\n6 9\n6 10\n10 11\n11 12\n12 13\n12 14\n12 15\n12 16";
        let (_, state, _, h) = pipeline(text);
        for level in h.levels() {
            for c in &level.communities {
                let mut expect: Vec<NodeId> = c
                    .end_communities
                    .iter()
                    .flat_map(|&s| state.community_nodes(s))
                    .collect();
                expect.sort_unstable();
                expect.dedup();
                assert_eq!(c.nodes, expect);
            }
        }
        assert_eq!(h.merge_events().len(), state.community_count() - 1);
    }

    fn point(level: Distance, size: usize, delta: usize, phi_level: Option<f64>) -> CurvePoint {
        CurvePoint { level, size, delta, consistent: 0, phi_level }
    }

    #[test]
    fn cutoffs_from_plateau_and_peak() {
        let curve = vec![
            point(1, 8, 2, Some(0.5)),
            point(2, 5, 3, Some(1.0)),
            point(3, 5, 0, None),
            point(4, 2, 3, Some(0.3)),
            point(5, 1, 1, Some(1.0)),
        ];
        let s = suggest_from_curve(&curve);
        assert_eq!(
            s.cutoffs,
            vec![
                Cutoff { level: 2, communities: 5, signal: CutoffSignal::Both },
                Cutoff { level: 5, communities: 1, signal: CutoffSignal::PhiPeak },
            ]
        );
    }

    #[test]
    fn monotone_curve_has_no_cutoff() {
        let curve = vec![
            point(1, 6, 2, Some(0.2)),
            point(2, 4, 2, Some(0.5)),
            point(3, 1, 3, Some(0.5)),
        ];
        let s = suggest_from_curve(&curve);
        assert!(s.cutoffs.is_empty());
        assert!(s.note.is_some());
        assert!(suggest_from_curve(&curve[..1]).note.is_some());
    }
}
