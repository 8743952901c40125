//! Self-falsification against size-matched Erdős–Rényi graphs.
//!
//! A detection is suspect when the input graph's hub fraction is not below, or
//! its consistency factor is not above, the median over random graphs with the
//! same node count and expected edge count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::pipeline::{detect, DetectOptions};

pub const DEFAULT_REPLICATES: usize = 10;

/// `G(n, p)` with every one of the `n(n-1)/2` pairs present independently with
/// probability `p`, then cleaned of degree-0 nodes. Node labels are `0..n`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 nodes, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    // geometric skips over the lower triangle (v > w), row by row
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v as NodeId, w as NodeId));
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    match Graph::from_edges(labels, edges) {
        Ok((g, _)) => Ok(g),
        Err(Error::EmptyGraph) => Err(Error::Generation(format!(
            "G({n}, {p}) with seed {seed} produced no edges"
        ))),
        Err(e) => Err(e),
    }
}

/// Random-graph parameters matching a graph's size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    pub n: usize,
    pub p: f64,
}

/// `n = N`, `p = 2E / (N(N-1))`, so the expected edge count equals `E`.
pub fn match_null(g: &Graph) -> NullModel {
    let n = g.node_count();
    NullModel {
        n,
        p: 2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)),
    }
}

/// Detection summary of one side of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideMetrics {
    /// Seed the graph was generated from; `None` for the input graph.
    pub seed: Option<u64>,
    pub nodes: usize,
    pub edges: usize,
    pub hubs: usize,
    pub hub_fraction: f64,
    /// `None` when fewer than three end-communities exist.
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Suspect,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifiabilityVerdict {
    pub seed: u64,
    pub replicate_count: usize,
    pub null_model: NullModel,
    pub real: SideMetrics,
    pub nulls: Vec<SideMetrics>,
    pub null_median_hub_fraction: f64,
    pub null_median_phi: Option<f64>,
    pub verdict: Verdict,
    pub reason: Option<String>,
}

fn measure(g: &Graph, seed: Option<u64>, opts: &DetectOptions) -> Result<SideMetrics> {
    let (hubs, phi) = match detect(g, opts) {
        Ok(d) => (d.roles.hubs().len(), d.phi.applicable_value()),
        Err(Error::NoHubs) => (0, None),
        Err(e) => return Err(e),
    };
    Ok(SideMetrics {
        seed,
        nodes: g.node_count(),
        edges: g.edge_count(),
        hubs,
        hub_fraction: hubs as f64 / g.node_count() as f64,
        phi,
    })
}

/// Median of a non-empty sample; even sizes average the two middle values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// `count` distinct replicate seeds derived from `seed`.
pub fn replicate_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds: Vec<u64> = Vec::with_capacity(count);
    while seeds.len() < count {
        let s: u64 = rng.gen();
        if !seeds.contains(&s) {
            seeds.push(s);
        }
    }
    seeds
}

pub fn falsifiability_check(
    g: &Graph,
    replicates: usize,
    seed: u64,
    opts: &DetectOptions,
) -> Result<FalsifiabilityVerdict> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let null_model = match_null(g);
    // a complete input graph would give p = 1, which G(n, p) excludes
    let p = null_model.p.min(1.0 - 1e-12);
    let real = measure(g, None, opts)?;
    let nulls = replicate_seeds(seed, replicates)
        .into_par_iter()
        .map(|s| measure(&generate_er(null_model.n, p, s)?, Some(s), opts))
        .collect::<Result<Vec<_>>>()?;

    let hub_fractions: Vec<f64> = nulls.iter().map(|m| m.hub_fraction).collect();
    let null_phis: Vec<f64> = nulls.iter().filter_map(|m| m.phi).collect();
    let null_median_hub_fraction = median(&hub_fractions).expect("replicates >= 1");
    let null_median_phi = median(&null_phis);

    let (verdict, reason) = match (real.hubs, real.phi, null_median_phi) {
        (0, _, _) => (Verdict::NotApplicable, Some("input graph has no hubs".to_owned())),
        (_, None, _) => (
            Verdict::NotApplicable,
            Some("consistency factor undefined on the input graph (at most two hubs)".to_owned()),
        ),
        (_, _, None) => (
            Verdict::NotApplicable,
            Some("consistency factor undefined on every random replicate".to_owned()),
        ),
        (_, Some(real_phi), Some(null_phi)) => {
            let mut why = Vec::new();
            if real.hub_fraction >= null_median_hub_fraction {
                why.push(format!(
                    "hub fraction {:.4} not below random median {:.4}",
                    real.hub_fraction, null_median_hub_fraction
                ));
            }
            if real_phi <= null_phi {
                why.push(format!(
                    "consistency factor {real_phi:.4} not above random median {null_phi:.4}"
                ));
            }
            if why.is_empty() {
                (Verdict::Valid, None)
            } else {
                (Verdict::Suspect, Some(why.join("; ")))
            }
        }
    };

    Ok(FalsifiabilityVerdict {
        seed,
        replicate_count: replicates,
        null_model,
        real,
        nulls,
        null_median_hub_fraction,
        null_median_phi,
        verdict,
        reason,
    })
}
