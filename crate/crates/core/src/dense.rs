//! Dense symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! This is the ground-truth path for small problems: the normalized
//! Laplacian of a graph with n ≤ a few hundred nodes fits comfortably, and
//! Jacobi is stable and fully deterministic. The iterative solver also uses
//! it for its Rayleigh-Ritz subproblems.

use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[j]` is the eigenvector for `values[j]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi with an off-diagonal threshold. Runs until the largest
/// off-diagonal entry falls below `tol * scale` or `max_sweeps` is hit;
/// either way the result is returned (Jacobi converges in practice long
/// before the cap on well-scaled input).
pub fn jacobi_eigen(a: &SymMatrix, tol: f64, max_sweeps: usize) -> EigenDecomposition {
    let n = a.n;
    let mut d = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = d
        .iter()
        .fold(0.0f64, |acc, x| if x.abs() > acc { x.abs() } else { acc })
        .max(1e-300);

    for _ in 0..max_sweeps {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = d[p * n + q];
                if apq.abs() > max_off {
                    max_off = apq.abs();
                }
                if apq.abs() <= tol * scale {
                    continue;
                }
                let app = d[p * n + p];
                let aqq = d[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let dip = d[i * n + p];
                        let diq = d[i * n + q];
                        d[i * n + p] = c * dip - s * diq;
                        d[p * n + i] = d[i * n + p];
                        d[i * n + q] = s * dip + c * diq;
                        d[q * n + i] = d[i * n + q];
                    }
                }
                d[p * n + p] = app - t * apq;
                d[q * n + q] = aqq + t * apq;
                d[p * n + q] = 0.0;
                d[q * n + p] = 0.0;

                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
        if max_off <= tol * scale {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i * n + i].total_cmp(&d[j * n + j]));

    let values = order.iter().map(|&i| d[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|i| v[i * n + col]).collect())
        .collect();
    EigenDecomposition { values, vectors }
}
