//! Parameter-free hierarchical overlapping community detection.
//!
//! The pipeline ranks nodes by centrality, seeds one end-community at every
//! local centrality peak (hub), spreads hub labels strictly downhill, merges
//! end-communities by hub-to-hub distance into a hierarchy and scores every
//! merge against Jaccard overlap. The resulting consistency factor, together
//! with the hub fraction, is compared against size-matched random graphs to
//! flag detections that should not be trusted.

pub mod centrality;
pub mod distance;
pub mod error;
pub mod falsify;
pub mod graph;
pub mod hierarchy;
pub mod jaccard;
pub mod pipeline;
pub mod propagation;
pub mod report;
pub mod roles;

pub use centrality::{degree_centrality, eigenvector_centrality, CentralityMeasure, CentralityVector};
pub use distance::{hub_distances, Distance, DistanceMatrix, D_INF};
pub use error::{Error, Result};
pub use falsify::{falsifiability_check, generate_er, match_null, FalsifiabilityVerdict, Verdict};
pub use graph::{load_edge_list, read_edge_list_file, Graph, IdMode, LoadedGraph, NodeId};
pub use hierarchy::{build_hierarchy, jd_consistent, phi, suggest_cutoffs, CommunityHierarchy, PhiScore};
pub use jaccard::{jaccard, JaccardMatrix};
pub use pipeline::{detect, DetectOptions, Detection};
pub use propagation::{membership_strength, overlap_metrics, propagate, OverlapMetrics, PropagationState};
pub use report::{run_pipeline, timing_scaling_report, DetectionReport, PipelineOptions};
pub use roles::{classify_roles, Role, RoleAssignment, RoleCounts};
