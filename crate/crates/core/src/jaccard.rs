//! Jaccard overlap between node sets, kept as exact ratios so that comparisons
//! never depend on floating-point rounding.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// `shared / union` with `union > 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Overlap {
    pub shared: u32,
    pub union: u32,
}

impl Overlap {
    pub fn new(shared: u32, union: u32) -> Self {
        debug_assert!(union > 0 && shared <= union);
        Overlap { shared, union }
    }

    pub fn value(self) -> f64 {
        self.shared as f64 / self.union as f64
    }
}

impl PartialEq for Overlap {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Overlap {}

impl PartialOrd for Overlap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Overlap {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.shared as u64 * other.union as u64).cmp(&(other.shared as u64 * self.union as u64))
    }
}

/// Size of the intersection of two ascending slices.
pub fn intersection_size(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Exact Jaccard overlap of two ascending, duplicate-free node lists.
pub fn overlap(a: &[NodeId], b: &[NodeId]) -> Result<Overlap> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::UndefinedJaccard);
    }
    let shared = intersection_size(a, b);
    Ok(Overlap::new(shared as u32, (a.len() + b.len() - shared) as u32))
}

/// `|A ∩ B| / |A ∪ B|` of two ascending, duplicate-free node lists.
pub fn jaccard(a: &[NodeId], b: &[NodeId]) -> Result<f64> {
    overlap(a, b).map(Overlap::value)
}

/// Pairwise overlaps between labelled communities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JaccardMatrix {
    labels: Vec<String>,
    size: usize,
    data: Vec<Overlap>,
}

impl JaccardMatrix {
    /// Computes all pairwise overlaps of `sets` (each ascending, non-empty).
    pub fn from_sets(labels: Vec<String>, sets: &[Vec<NodeId>]) -> Result<Self> {
        let size = sets.len();
        if labels.len() != size {
            return Err(Error::InvalidArgument("label count differs from set count".into()));
        }
        let mut data = Vec::with_capacity(size * size);
        for a in sets {
            for b in sets {
                data.push(overlap(a, b)?);
            }
        }
        Ok(JaccardMatrix { labels, size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn overlap(&self, p: usize, q: usize) -> Overlap {
        self.data[p * self.size + q]
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.overlap(p, q).value()
    }
}
