use thiserror::Error;

/// Errors surfaced by the detection pipeline, tagged with the stage that raised them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph: line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph: no edges left after removing self-loops and degree-0 nodes")]
    EmptyGraph,

    #[error("graph: I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("centrality: power iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    Convergence {
        iterations: usize,
        last_change: f64,
        last_iterate: Vec<f64>,
    },

    #[error("propagation: overlap metrics undefined without hubs")]
    NoHubs,

    #[error("hierarchy: cannot build a hierarchy from zero end-communities")]
    EmptyHierarchy,

    #[error("hierarchy: Jaccard index of two empty sets is undefined")]
    UndefinedJaccard,

    #[error("falsify: {0}")]
    Generation(String),

    #[error("report: {0}")]
    InsufficientSpan(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("report: JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
