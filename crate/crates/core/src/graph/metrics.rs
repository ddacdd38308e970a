use super::{quadratic_form, symmetric_eigen, GraphError, InteractionGraph, PartitionVector};
use crate::scalar::Real;

/// The `k` smallest Laplacian eigenvalues, ascending.
pub fn laplacian_eigenvalues<T: Real>(
    g: &InteractionGraph<T>,
    k: usize,
) -> Result<Vec<T>, GraphError> {
    if k == 0 || k > g.len() {
        return Err(GraphError::KOutOfRange { k, n: g.len() });
    }
    let e = symmetric_eigen(&g.laplacian(), g.len());
    Ok(e.values.into_iter().take(k).collect())
}

/// Eigenvector of the second-smallest Laplacian eigenvalue.
pub fn fiedler_vector<T: Real>(g: &InteractionGraph<T>) -> Result<Vec<T>, GraphError> {
    if g.len() < 2 {
        return Err(GraphError::KOutOfRange { k: 2, n: g.len() });
    }
    let mut e = symmetric_eigen(&g.laplacian(), g.len());
    Ok(e.vectors.swap_remove(1))
}

/// Per-cluster conductance `v_j^T L v_j / v_j^T D v_j` of the given partition.
pub fn conductance<T: Real>(
    g: &InteractionGraph<T>,
    p: &PartitionVector,
) -> Result<Vec<T>, GraphError> {
    p.check_len(g.len())?;
    let l = g.laplacian();
    (0..p.k())
        .map(|j| {
            let v = p.indicator::<T>(j);
            let volume: T = (0..g.len()).map(|i| v[i] * g.degree(i)).sum();
            if volume <= T::zero() {
                return Err(GraphError::ZeroVolume(j));
            }
            Ok(quadratic_form(&l, &v) / volume)
        })
        .collect()
}

/// Per-cluster association ratio `v_j^T A v_j / v_j^T v_j`.
pub fn association_ratio<T: Real>(
    g: &InteractionGraph<T>,
    p: &PartitionVector,
) -> Result<Vec<T>, GraphError> {
    p.check_len(g.len())?;
    (0..p.k())
        .map(|j| {
            let v = p.indicator::<T>(j);
            let size: T = v.iter().copied().sum();
            if size == T::zero() {
                return Err(GraphError::EmptyCluster(j));
            }
            Ok(quadratic_form(g.adjacency(), &v) / size)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenResult<T> {
    pub suitable: bool,
    pub lambda_k: T,
}

/// Flags a topology as well clustered into `k` parts when `lambda_k <= threshold`.
pub fn cheeger_screen<T: Real>(
    g: &InteractionGraph<T>,
    k: usize,
    threshold: T,
) -> Result<ScreenResult<T>, GraphError> {
    let lambda_k = *laplacian_eigenvalues(g, k)?.last().expect("k >= 1");
    Ok(ScreenResult {
        suitable: lambda_k <= threshold,
        lambda_k,
    })
}
