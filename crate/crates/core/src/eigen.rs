//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use crate::error::{Error, Result};

/// Largest (real) dimension accepted by [`symmetric_eigen`].
pub const MAX_DIM: usize = 2_000;
const MAX_SWEEPS: usize = 100;
const REL_TOL: f64 = 1e-14;

/// Eigen-decomposition `M = V diag(values) V^T`; `vectors` is row-major with eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub dim: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn off_diagonal(m: &[f64], dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                s += m[i * dim + j] * m[i * dim + j];
            }
        }
    }
    s.sqrt()
}

/// Row-major `dim x dim` symmetric input. Sweeps the pairs `(p, q)`, `p < q`, in row order
/// until the off-diagonal Frobenius mass drops below `1e-14 * ||M||_F`.
pub fn symmetric_eigen(matrix: &[f64], dim: usize) -> Result<SymmetricEigen> {
    assert_eq!(matrix.len(), dim * dim, "matrix buffer does not match dimension");
    if dim > MAX_DIM {
        return Err(Error::TooLarge { dim, limit: MAX_DIM });
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let norm = frobenius(&a);
    let target = REL_TOL * norm;
    let mut sweeps = 0;
    while off_diagonal(&a, dim) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                a[p * dim + q] = 0.0;
                a[q * dim + p] = 0.0;
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..dim).map(|i| a[i * dim + i]).collect();
    Ok(SymmetricEigen { dim, values, vectors: v, sweeps })
}

impl SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] =
                    (0..d).map(|k| self.vectors[i * d + k] * self.values[k] * self.vectors[j * d + k]).sum();
            }
        }
        out
    }
}

/// `||V diag V^T - M||_F / ||M||_F`.
pub fn reconstruction_error(matrix: &[f64], eig: &SymmetricEigen) -> f64 {
    let r = eig.reconstruct();
    let diff: f64 = r.iter().zip(matrix).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let n = frobenius(matrix);
    if n == 0.0 {
        diff
    } else {
        diff / n
    }
}
