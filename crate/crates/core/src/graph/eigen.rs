//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// `vectors[j]` is the unit eigenvector for `values[j]`.
    pub vectors: Vec<Vec<T>>,
}

/// Decomposes the row-major symmetric `n x n` matrix `a`.
///
/// Eigenvectors are sign-normalised so their largest-magnitude entry (first one
/// on ties) is positive, which makes downstream rounding deterministic.
pub fn symmetric_eigen<T: Real>(a: &[T], n: usize) -> SymmetricEigen<T> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut m = a.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }

    let frob: T = m.iter().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::epsilon() * frob;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= tol || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                rotate(&mut m, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .partial_cmp(&m[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&j| {
            let mut col: Vec<T> = (0..n).map(|r| v[r * n + j]).collect();
            let mut lead = 0;
            for (r, x) in col.iter().enumerate() {
                if x.abs() > col[lead].abs() + T::epsilon() {
                    lead = r;
                }
            }
            if col.get(lead).is_some_and(|x| *x < T::zero()) {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    SymmetricEigen { values, vectors }
}

fn rotate<T: Real>(m: &mut [T], v: &mut [T], n: usize, p: usize, q: usize) {
    let two = T::lit(2.0);
    let apq = m[p * n + q];
    let theta = (m[q * n + q] - m[p * n + p]) / (two * apq);
    let t = if theta.abs() > T::lit(1e30).min(T::max_value().sqrt()) {
        T::one() / (two * theta)
    } else {
        let sign = if theta < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let tau = s / (T::one() + c);

    m[p * n + p] -= t * apq;
    m[q * n + q] += t * apq;
    m[p * n + q] = T::zero();
    m[q * n + p] = T::zero();
    for r in 0..n {
        if r != p && r != q {
            let g = m[r * n + p];
            let h = m[r * n + q];
            let np = g - s * (h + g * tau);
            let nq = h + s * (g - h * tau);
            m[r * n + p] = np;
            m[p * n + r] = np;
            m[r * n + q] = nq;
            m[q * n + r] = nq;
        }
    }
    for r in 0..n {
        let g = v[r * n + p];
        let h = v[r * n + q];
        v[r * n + p] = g - s * (h + g * tau);
        v[r * n + q] = h + s * (g - h * tau);
    }
}
