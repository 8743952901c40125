//! Detection report: the summary table row, curves, hierarchy, falsification
//! verdict and timings for one network, plus runtime scaling across reports.

use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::centrality::CentralityMeasure;
use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::falsify::{falsifiability_check, FalsifiabilityVerdict, DEFAULT_REPLICATES};
use crate::graph::{read_edge_list_file, CleaningStats, Graph, IdMode, LoadedGraph};
use crate::hierarchy::{suggest_cutoffs, CommunityHierarchy, CurvePoint, CutoffSuggestions, MergeEvent, PhiScore};
use crate::pipeline::{detect, DetectOptions};
use crate::propagation::Step;
use crate::roles::RoleCounts;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub centrality: CentralityMeasure,
    pub t_max: Option<Step>,
    pub id_mode: IdMode,
    pub falsify: bool,
    pub replicates: usize,
    pub seed: u64,
    pub overlap_steps: bool,
    pub normalize_timing: bool,
    pub network_name: Option<String>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            centrality: CentralityMeasure::Degree,
            t_max: None,
            id_mode: IdMode::Numeric,
            falsify: false,
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            overlap_steps: false,
            normalize_timing: false,
            network_name: None,
        }
    }
}

impl PipelineOptions {
    fn detect_options(&self) -> DetectOptions {
        DetectOptions {
            centrality: self.centrality,
            t_max: self.t_max,
            overlap_steps: self.overlap_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityEntry {
    pub id: u32,
    /// Hubs of the end-communities beneath this community.
    pub hubs: Vec<String>,
    pub size: usize,
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: Distance,
    pub communities: Vec<CommunityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    /// Ids below the hub count are end-communities, numbered in hub order.
    pub merge_events: Vec<MergeEvent>,
    pub levels: Vec<LevelEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warnings {
    pub self_loops: usize,
    pub duplicate_edges: usize,
    pub removed_isolated_nodes: usize,
    pub propagation_truncated: bool,
    pub truncated_by_disconnection: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub load_seconds: f64,
    pub centrality_seconds: f64,
    pub roles_seconds: f64,
    pub propagation_seconds: f64,
    pub distances_seconds: f64,
    pub hierarchy_seconds: f64,
    pub falsify_seconds: f64,
    /// Detection time without loading or falsification.
    pub total_seconds: f64,
    /// Cumulative propagation seconds at the end of each step, one per step up to `t_fin`.
    pub propagation_cumulative: Vec<f64>,
    /// `(step / t_fin, time / final time)` pairs when normalisation was requested.
    pub propagation_cumulative_normalized: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub schema_version: u32,
    pub network_name: String,
    pub centrality: CentralityMeasure,
    pub nodes: usize,
    pub edges: usize,
    pub roles: RoleCounts,
    pub hubs: Vec<String>,
    /// Nodes holding more than one community label after propagation.
    pub multi_label_nodes: usize,
    pub t_fin: Step,
    pub m_h: f64,
    pub m_x: f64,
    pub eps_max: Option<Distance>,
    pub phi: PhiScore,
    pub merges: usize,
    pub consistent_merges: usize,
    pub cutoffs: CutoffSuggestions,
    pub curves: Vec<CurvePoint>,
    pub infections_per_step: Vec<usize>,
    pub hierarchy: HierarchyReport,
    pub falsifiability: Option<FalsifiabilityVerdict>,
    pub warnings: Warnings,
    pub timing: Timing,
}

impl DetectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `epsilon,size,delta,phi_eps` rows, with an `epsilon = 0` row for the end-communities.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("epsilon,size,delta,phi_eps\n");
        out.push_str(&format!("0,{},0,\n", self.roles.hub));
        for p in &self.curves {
            let phi = p.phi_level.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", p.level, p.size, p.delta, phi));
        }
        out
    }

    /// `step,cumulative_seconds` rows for the propagation stage.
    pub fn timing_csv(&self) -> String {
        let mut out = String::from("step,cumulative_seconds\n");
        for (k, t) in self.timing.propagation_cumulative.iter().enumerate() {
            out.push_str(&format!("{},{}\n", k + 1, t));
        }
        out
    }
}

fn hierarchy_report(g: &Graph, hubs: &[u32], h: &CommunityHierarchy) -> HierarchyReport {
    let levels = h
        .levels()
        .iter()
        .map(|level| LevelEntry {
            level: level.level,
            communities: level
                .communities
                .iter()
                .map(|c| CommunityEntry {
                    id: c.id,
                    hubs: c
                        .end_communities
                        .iter()
                        .map(|&s| g.label(hubs[s as usize]).to_owned())
                        .collect(),
                    size: c.nodes.len(),
                    nodes: c.nodes.iter().map(|&v| g.label(v).to_owned()).collect(),
                })
                .collect(),
        })
        .collect();
    HierarchyReport {
        merge_events: h.merge_events().to_vec(),
        levels,
    }
}

fn seconds(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Runs detection (and optionally falsification) on an already loaded graph.
pub fn report_for_graph(
    name: &str,
    loaded: &LoadedGraph,
    load_time: Duration,
    opts: &PipelineOptions,
) -> Result<DetectionReport> {
    let g = &loaded.graph;
    let detect_opts = opts.detect_options();
    let d = detect(g, &detect_opts)?;

    let (falsifiability, falsify_time) = if opts.falsify {
        let clock = Instant::now();
        let v = falsifiability_check(g, opts.replicates, opts.seed, &detect_opts)?;
        (Some(v), clock.elapsed())
    } else {
        (None, Duration::ZERO)
    };

    let t = &d.times;
    let cumulative: Vec<f64> = t.propagation_steps.iter().copied().map(seconds).collect();
    let normalized = opts.normalize_timing.then(|| {
        let n = cumulative.len() as f64;
        let last = cumulative.last().copied().unwrap_or(0.0);
        cumulative
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let y = if last > 0.0 { c / last } else { 1.0 };
                [(k + 1) as f64 / n, y]
            })
            .collect()
    });
    let total = t.centrality + t.roles + t.propagation + t.distances + t.hierarchy;
    let timing = Timing {
        load_seconds: seconds(load_time),
        centrality_seconds: seconds(t.centrality),
        roles_seconds: seconds(t.roles),
        propagation_seconds: seconds(t.propagation),
        distances_seconds: seconds(t.distances),
        hierarchy_seconds: seconds(t.hierarchy),
        falsify_seconds: seconds(falsify_time),
        total_seconds: seconds(total),
        propagation_cumulative: cumulative,
        propagation_cumulative_normalized: normalized,
    };

    let stats: CleaningStats = loaded.stats;
    let hubs = d.roles.hubs();
    Ok(DetectionReport {
        schema_version: SCHEMA_VERSION,
        network_name: name.to_owned(),
        centrality: opts.centrality,
        nodes: g.node_count(),
        edges: g.edge_count(),
        roles: d.roles.counts(),
        hubs: hubs.iter().map(|&h| g.label(h).to_owned()).collect(),
        multi_label_nodes: d.propagation.histories().iter().filter(|h| h.len() > 1).count(),
        t_fin: d.propagation.t_fin(),
        m_h: d.overlap.m_h,
        m_x: d.overlap.m_x,
        eps_max: d.hierarchy.eps_max(),
        phi: d.phi,
        merges: d.hierarchy.merge_events().len(),
        consistent_merges: d.hierarchy.consistent_merges(),
        cutoffs: suggest_cutoffs(&d.hierarchy),
        curves: d.hierarchy.curve().to_vec(),
        infections_per_step: d.propagation.infections_per_step().to_vec(),
        hierarchy: hierarchy_report(g, hubs, &d.hierarchy),
        falsifiability,
        warnings: Warnings {
            self_loops: stats.self_loops,
            duplicate_edges: stats.duplicate_edges,
            removed_isolated_nodes: stats.removed_isolated_nodes,
            propagation_truncated: d.propagation.truncated(),
            truncated_by_disconnection: d.hierarchy.truncated_by_disconnection(),
        },
        timing,
    })
}

/// Loads an edge-list file and runs the full pipeline on it.
pub fn run_pipeline(input: &Path, opts: &PipelineOptions) -> Result<DetectionReport> {
    let clock = Instant::now();
    let loaded = read_edge_list_file(input, opts.id_mode)?;
    let load_time = clock.elapsed();
    let name = opts.network_name.clone().unwrap_or_else(|| {
        input
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    report_for_graph(&name, &loaded, load_time, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub network_name: String,
    pub edges: usize,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    /// Least-squares slope of `ln(total seconds)` against `ln(E)`.
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<ScalingPoint>,
}

/// Fits runtime against edge count on log–log axes. Needs at least three
/// reports whose edge counts span two decades.
pub fn timing_scaling_report(reports: &[DetectionReport]) -> Result<ScalingSummary> {
    if reports.len() < 3 {
        return Err(Error::InsufficientSpan(format!(
            "need at least 3 reports, got {}",
            reports.len()
        )));
    }
    let min_e = reports.iter().map(|r| r.edges).min().unwrap_or(0);
    let max_e = reports.iter().map(|r| r.edges).max().unwrap_or(0);
    if min_e == 0 || (max_e as f64) < 100.0 * min_e as f64 {
        return Err(Error::InsufficientSpan(format!(
            "edge counts {min_e}..{max_e} span less than two decades"
        )));
    }
    if let Some(r) = reports.iter().find(|r| !(r.timing.total_seconds > 0.0)) {
        return Err(Error::InsufficientSpan(format!(
            "report {:?} has no positive runtime",
            r.network_name
        )));
    }
    let xs: Vec<f64> = reports.iter().map(|r| (r.edges as f64).ln()).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.timing.total_seconds.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(ScalingSummary {
        slope,
        intercept: my - slope * mx,
        points: reports
            .iter()
            .map(|r| ScalingPoint {
                network_name: r.network_name.clone(),
                edges: r.edges,
                total_seconds: r.timing.total_seconds,
            })
            .collect(),
    })
}
