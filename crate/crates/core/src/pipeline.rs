//! Runs roles → propagation → hub distances → hierarchy on an in-memory graph.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::centrality::{self, CentralityMeasure, CentralityVector};
use crate::distance::{hub_distances, DistanceMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hierarchy::{build_hierarchy, phi, CommunityHierarchy, PhiScore};
use crate::propagation::{overlap_metrics, propagate_timed, OverlapMetrics, PropagationState, Step};
use crate::roles::{classify_roles, RoleAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DetectOptions {
    pub centrality: CentralityMeasure,
    /// Step cap for propagation; defaults to the node count.
    pub t_max: Option<Step>,
    /// Compute hub distances concurrently with propagation.
    pub overlap_steps: bool,
}

/// Wall-clock time spent in each stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimes {
    pub centrality: Duration,
    pub roles: Duration,
    pub propagation: Duration,
    pub distances: Duration,
    pub hierarchy: Duration,
    /// Cumulative propagation time at the end of each step up to `t_fin`.
    pub propagation_steps: Vec<Duration>,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub centrality: CentralityVector,
    pub roles: RoleAssignment,
    pub propagation: PropagationState,
    pub overlap: OverlapMetrics,
    pub distances: DistanceMatrix,
    pub hierarchy: CommunityHierarchy,
    pub phi: PhiScore,
    pub times: StageTimes,
}

impl Detection {
    pub fn hub_fraction(&self) -> f64 {
        self.roles.hubs().len() as f64 / self.roles.roles().len() as f64
    }
}

/// Full detection on `g`. Fails with [`Error::NoHubs`] when no node is a hub.
pub fn detect(g: &Graph, opts: &DetectOptions) -> Result<Detection> {
    let mut times = StageTimes::default();

    let clock = Instant::now();
    let c = centrality::compute(g, opts.centrality)?;
    times.centrality = clock.elapsed();

    let clock = Instant::now();
    let roles = classify_roles(g, &c);
    times.roles = clock.elapsed();
    if roles.hubs().is_empty() {
        return Err(Error::NoHubs);
    }

    let t_max = opts.t_max.unwrap_or(g.node_count() as Step);
    let timed_propagation = || {
        let clock = Instant::now();
        let out = propagate_timed(g, &c, &roles, t_max);
        (out, clock.elapsed())
    };
    let timed_distances = || {
        let clock = Instant::now();
        let r0 = hub_distances(g, roles.hubs());
        (r0, clock.elapsed())
    };
    let ((propagated, prop_time), (r0, dist_time)) = if opts.overlap_steps {
        rayon::join(timed_propagation, timed_distances)
    } else {
        let p = timed_propagation();
        (p, timed_distances())
    };
    let (state, steps) = propagated?;
    times.propagation = prop_time;
    times.propagation_steps = steps;
    times.distances = dist_time;

    let overlap = overlap_metrics(&state, g)?;

    let clock = Instant::now();
    let hierarchy = build_hierarchy(&state, &r0)?;
    times.hierarchy = clock.elapsed();
    let phi = phi(&hierarchy, roles.hubs().len());

    Ok(Detection {
        centrality: c,
        roles,
        propagation: state,
        overlap,
        distances: r0,
        hierarchy,
        phi,
        times,
    })
}
