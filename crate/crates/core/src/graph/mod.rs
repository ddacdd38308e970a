//! Weighted interaction graphs, their Laplacian spectra, and cluster-quality
//! metrics (conductance, association ratio, spectral screening).

mod eigen;
mod metrics;

use thiserror::Error;

use crate::circuit::ScheduledCircuit;
use crate::scalar::Real;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use metrics::{
    association_ratio, cheeger_screen, conductance, fiedler_vector, laplacian_eigenvalues,
    ScreenResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("k = {k} out of range for a graph with {n} vertices")]
    KOutOfRange { k: usize, n: usize },
    #[error("cluster {0} has zero volume")]
    ZeroVolume(usize),
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("partition covers {got} vertices, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} assigned to cluster {cluster}, but k = {k}")]
    ClusterOutOfRange {
        vertex: usize,
        cluster: usize,
        k: usize,
    },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
}

/// Symmetric, non-negative weighted graph with zero diagonal, stored dense.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph<T> {
    n: usize,
    weights: Vec<T>,
}

impl<T: Real> InteractionGraph<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            weights: vec![T::zero(); n * n],
        }
    }

    /// Builds a graph, accumulating repeated edges.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(n);
        for (i, j, w) in edges {
            if i == j || i >= n || j >= n || !w.is_finite() || w < T::zero() {
                return Err(GraphError::InvalidEdge(i, j));
            }
            g.add_weight(i, j, w);
        }
        Ok(g)
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::from_edges(n, edges.iter().map(|&(i, j)| (i, j, T::one())))
    }

    pub fn add_weight(&mut self, i: usize, j: usize, w: T) {
        debug_assert!(i != j);
        self.weights[i * self.n + j] += w;
        self.weights[j * self.n + i] += w;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[i * self.n + j]
    }

    pub fn degree(&self, i: usize) -> T {
        self.weights[i * self.n..(i + 1) * self.n]
            .iter()
            .copied()
            .sum()
    }

    /// Neighbours with non-zero weight.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        self.weights[i * self.n..(i + 1) * self.n]
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != T::zero())
            .map(|(j, w)| (j, *w))
    }

    /// Sum of weights over unordered pairs.
    pub fn total_weight(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                t += self.weight(i, j);
            }
        }
        t
    }

    pub fn adjacency(&self) -> &[T] {
        &self.weights
    }

    /// Row-major `D - A`.
    pub fn laplacian(&self) -> Vec<T> {
        let mut l: Vec<T> = self.weights.iter().map(|&w| -w).collect();
        for i in 0..self.n {
            l[i * self.n + i] = self.degree(i);
        }
        l
    }

    /// Induced subgraph on `vertices`, relabelled `0..vertices.len()` in order.
    pub fn subgraph(&self, vertices: &[usize]) -> Self {
        let m = vertices.len();
        let mut g = Self::new(m);
        for (a, &i) in vertices.iter().enumerate() {
            for (b, &j) in vertices.iter().enumerate() {
                g.weights[a * m + b] = self.weight(i, j);
            }
        }
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut g = Self::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                g.weights[perm[i] * self.n + perm[j]] = self.weight(i, j);
            }
        }
        g
    }

    /// Weight crossing between different clusters, each edge counted once.
    pub fn cut_weight(&self, p: &PartitionVector) -> T {
        let mut cut = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if p.cluster_of(i) != p.cluster_of(j) {
                    cut += self.weight(i, j);
                }
            }
        }
        cut
    }
}

/// Which gates contribute to an interaction graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Full,
    /// Gates with `start <= t_gate < start + width`.
    Range {
        start: f64,
        width: f64,
    },
}

impl Window {
    pub fn contains(&self, t: f64) -> bool {
        match *self {
            Window::Full => true,
            Window::Range { start, width } => start <= t && t < start + width,
        }
    }
}

/// `A_ij` = number of two-qubit gates on `(i, j)` whose start time lies in `window`.
/// Barriers and single-qubit gates do not contribute.
pub fn interaction_graph<T: Real>(sched: &ScheduledCircuit, window: Window) -> InteractionGraph<T> {
    let mut g = InteractionGraph::new(sched.circuit.num_qubits);
    for (gate, &t) in sched.circuit.gates().iter().zip(&sched.start_times) {
        if let Some((a, b)) = gate.two_qubit_pair() {
            if window.contains(t) {
                g.add_weight(a, b, T::one());
            }
        }
    }
    g
}

/// Vertex to cluster map over `k` clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionVector {
    assignment: Vec<usize>,
    k: usize,
}

impl PartitionVector {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self, GraphError> {
        if let Some((vertex, &cluster)) = assignment.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(GraphError::ClusterOutOfRange { vertex, cluster, k });
        }
        Ok(Self { assignment, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn set(&mut self, v: usize, cluster: usize) {
        assert!(cluster < self.k);
        self.assignment[v] = cluster;
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&v| self.assignment[v] == cluster)
            .collect()
    }

    /// Indicator vector `v_j`: 1 for members of `cluster`, else 0.
    pub fn indicator<T: Real>(&self, cluster: usize) -> Vec<T> {
        self.assignment
            .iter()
            .map(|&c| if c == cluster { T::one() } else { T::zero() })
            .collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<(), GraphError> {
        if self.assignment.len() != n {
            return Err(GraphError::SizeMismatch {
                expected: n,
                got: self.assignment.len(),
            });
        }
        Ok(())
    }
}

/// `x^T M x` for a row-major dense `M`.
pub(crate) fn quadratic_form<T: Real>(m: &[T], x: &[T]) -> T {
    let n = x.len();
    let mut acc = T::zero();
    for i in 0..n {
        if x[i] == T::zero() {
            continue;
        }
        let row: T = (0..n).map(|j| m[i * n + j] * x[j]).sum();
        acc += x[i] * row;
    }
    acc
}
