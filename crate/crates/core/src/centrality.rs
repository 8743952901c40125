//! Node centrality scores used to rank nodes against their neighbours.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Default convergence tolerance for power iteration.
pub const EIGENVECTOR_TOL: f64 = 1e-10;
/// Default iteration cap for power iteration.
pub const EIGENVECTOR_MAX_ITER: usize = 1000;
/// Relative tolerance under which two eigenvector scores count as equal.
pub const EIGENVECTOR_EQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityMeasure {
    #[default]
    Degree,
    Eigenvector,
}

impl std::str::FromStr for CentralityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(Self::Degree),
            "eigenvector" => Ok(Self::Eigenvector),
            other => Err(Error::InvalidArgument(format!(
                "unknown centrality measure {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    scores: Vec<f64>,
    measure: CentralityMeasure,
    eq_tol: f64,
}

impl CentralityVector {
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn measure(&self) -> CentralityMeasure {
        self.measure
    }

    #[inline]
    pub fn score(&self, node: NodeId) -> f64 {
        self.scores[node as usize]
    }

    /// Compares two nodes' scores. Degree scores compare exactly; eigenvector
    /// scores within `1e-9 * max` of each other are equal.
    #[inline]
    pub fn compare(&self, a: NodeId, b: NodeId) -> Ordering {
        let (x, y) = (self.score(a), self.score(b));
        if (x - y).abs() <= self.eq_tol {
            Ordering::Equal
        } else if x > y {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

pub fn compute(g: &Graph, measure: CentralityMeasure) -> Result<CentralityVector> {
    match measure {
        CentralityMeasure::Degree => Ok(degree_centrality(g)),
        CentralityMeasure::Eigenvector => {
            eigenvector_centrality(g, EIGENVECTOR_TOL, EIGENVECTOR_MAX_ITER)
        }
    }
}

pub fn degree_centrality(g: &Graph) -> CentralityVector {
    CentralityVector {
        scores: g.nodes().map(|i| g.degree(i) as f64).collect(),
        measure: CentralityMeasure::Degree,
        eq_tol: 0.0,
    }
}

/// Leading eigenvector of the adjacency matrix by power iteration.
///
/// Iterates on `A + I`, which has the same eigenvectors as `A` but no
/// eigenvalue of equal magnitude and opposite sign, so bipartite graphs
/// (stars, paths, even cycles) converge instead of oscillating.
pub fn eigenvector_centrality(g: &Graph, tol: f64, max_iter: usize) -> Result<CentralityVector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = g.node_count();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        for i in g.nodes() {
            let s: f64 = g.neighbors(i).iter().map(|&j| x[j as usize]).sum();
            next[i as usize] = x[i as usize] + s;
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        change = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if change < tol {
            let max = x.iter().cloned().fold(0.0, f64::max);
            return Ok(CentralityVector {
                scores: x,
                measure: CentralityMeasure::Eigenvector,
                eq_tol: EIGENVECTOR_EQ_TOL * max,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        last_change: change,
        last_iterate: x,
    })
}
