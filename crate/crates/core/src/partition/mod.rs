//! Cardinality-constrained minimum-cut partitioning.
//!
//! [`spectral_partition`] rounds the Fiedler vector at the capacity boundary,
//! [`kl_refine`] improves any feasible partition with Kernighan-Lin passes, and
//! [`exact_min_cut`] enumerates all bipartitions of small graphs as a test oracle.

mod exact;
mod kl;
mod spectral;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{quadratic_form, GraphError, InteractionGraph, PartitionVector};
use crate::scalar::Real;

pub use exact::{exact_min_cut, EXACT_MAX_VERTICES};
pub use kl::kl_refine;
pub use spectral::spectral_partition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("need at least {min} clusters, got {got}")]
    TooFewClusters { min: usize, got: usize },
    #[error("cluster {0} has zero capacity")]
    ZeroCapacity(usize),
    #[error("{n} vertices do not fit in total capacity {capacity}")]
    Infeasible { n: usize, capacity: usize },
    #[error("vertex {vertex} pinned to cluster {cluster}, which does not exist")]
    BadPin { vertex: usize, cluster: usize },
    #[error("cluster {0} has more pinned vertices than capacity")]
    PinnedOverCapacity(usize),
    #[error("partition violates the size spec: {0}")]
    Violates(String),
    #[error(
        "exact search limited to {max} vertices and 2 clusters; got {n} vertices, {k} clusters"
    )]
    TooLarge { n: usize, k: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-cluster capacities plus optional fixed placements.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SizeSpec {
    pub sizes: Vec<usize>,
    /// vertex -> cluster
    pub pinned: BTreeMap<usize, usize>,
}

impl SizeSpec {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self {
            sizes,
            pinned: BTreeMap::new(),
        }
    }

    /// Two clusters of `s` each.
    pub fn equal(k: usize, s: usize) -> Self {
        Self::new(vec![s; k])
    }

    pub fn pin(mut self, vertex: usize, cluster: usize) -> Self {
        self.pinned.insert(vertex, cluster);
        self
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn capacity(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Checks the spec is satisfiable for `n` vertices.
    pub fn validate(&self, n: usize) -> Result<(), PartitionError> {
        if self.sizes.is_empty() {
            return Err(PartitionError::TooFewClusters { min: 1, got: 0 });
        }
        if let Some(j) = self.sizes.iter().position(|&s| s == 0) {
            return Err(PartitionError::ZeroCapacity(j));
        }
        if n > self.capacity() {
            return Err(PartitionError::Infeasible {
                n,
                capacity: self.capacity(),
            });
        }
        let mut used = vec![0usize; self.k()];
        for (&vertex, &cluster) in &self.pinned {
            if cluster >= self.k() || vertex >= n {
                return Err(PartitionError::BadPin { vertex, cluster });
            }
            used[cluster] += 1;
        }
        if let Some(j) = (0..self.k()).find(|&j| used[j] > self.sizes[j]) {
            return Err(PartitionError::PinnedOverCapacity(j));
        }
        Ok(())
    }

    /// Checks `p` respects capacities and pins.
    pub fn check(&self, p: &PartitionVector) -> Result<(), PartitionError> {
        if p.k() != self.k() {
            return Err(PartitionError::Violates(format!(
                "partition has {} clusters, spec has {}",
                p.k(),
                self.k()
            )));
        }
        for (j, (&have, &cap)) in p.sizes().iter().zip(&self.sizes).enumerate() {
            if have > cap {
                return Err(PartitionError::Violates(format!(
                    "cluster {j} holds {have} > {cap}"
                )));
            }
        }
        for (&v, &c) in &self.pinned {
            if v >= p.len() || p.cluster_of(v) != c {
                return Err(PartitionError::Violates(format!(
                    "vertex {v} must stay in cluster {c}"
                )));
            }
        }
        Ok(())
    }
}

/// `C = sum_j v_j^T L v_j`; twice the weight crossing between clusters.
pub fn cut_cost<T: Real>(g: &InteractionGraph<T>, p: &PartitionVector) -> T {
    let l = g.laplacian();
    (0..p.k())
        .map(|j| quadratic_form(&l, &p.indicator::<T>(j)))
        .sum()
}

/// Spectral partition followed by Kernighan-Lin refinement.
pub fn partition<T: Real>(
    g: &InteractionGraph<T>,
    spec: &SizeSpec,
) -> Result<PartitionVector, PartitionError> {
    let p = spectral_partition(g, spec)?;
    kl_refine(g, &p, spec)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::InteractionGraph;

    pub fn two_triangles_bridge() -> InteractionGraph<f64> {
        InteractionGraph::unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
            .unwrap()
    }

    pub fn complete(n: usize) -> InteractionGraph<f64> {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        InteractionGraph::unweighted(n, &edges).unwrap()
    }

    /// Two K5 on {0..4} and {5..9} joined by the edge (4, 5).
    pub fn barbell() -> InteractionGraph<f64> {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((4, 5));
        InteractionGraph::unweighted(10, &edges).unwrap()
    }
}
