//! Normalized-Laplacian operator, bottom eigenpairs, gap estimation, and the
//! spectral-clustering baseline.
//!
//! The operator is matrix-free: applying 𝓛 = I − D^{−1/2} A D^{−1/2} or the
//! lazy-walk matrix P = I − 𝓛/2 costs one adjacency sweep. Eigenpairs come
//! from either a dense Jacobi decomposition (small graphs, also the oracle
//! for tests) or subspace iteration on P with Rayleigh-Ritz extraction.

use crate::dense::{jacobi_eigen, SymMatrix};
use crate::graph::{partition_max_conductance, GraphError, Partition, WeightedGraph};
use crate::kmeans::{kmeans, KMeansError};
use crate::rng::Rng;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;
use thiserror::Error;

/// Graphs at or below this size take the dense eigensolver path.
pub const DENSE_EIGEN_MAX_N: usize = 200;

const DEFAULT_TOL: f64 = 1e-8;
/// Internal seed for the deterministic subspace-iteration start block.
const SUBSPACE_INIT_SEED: u64 = 0x5CA1_AB1E;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node {0} is isolated (zero degree)")]
    IsolatedVertex(usize),
    #[error("requested {requested} eigenpairs from a graph of {n} nodes")]
    TooManyPairs { requested: usize, n: usize },
    #[error("k must be at least {min}, got {got}")]
    InvalidK { got: usize, min: usize },
    #[error("eigensolver did not reach tolerance: best residual {best_residual:.3e} after {iterations} iterations")]
    NonConvergence {
        best_residual: f64,
        iterations: usize,
    },
    #[error("reference partition is invalid: {0}")]
    InvalidReference(GraphError),
    #[error("k-means failed: {0}")]
    KMeans(#[from] KMeansError),
}

/// Matrix-free normalized Laplacian of a graph.
///
/// Construction fails on isolated vertices: 1/√d is undefined there.
#[derive(Debug, Clone)]
pub struct LaplacianOperator {
    n: usize,
    edge_count: usize,
    offsets: Vec<usize>,
    /// (neighbor, w(u,v)/√(d_u·d_v)) pairs, CSR layout.
    scaled: Vec<(usize, f64)>,
    inv_sqrt_deg: Vec<f64>,
    degrees: Vec<f64>,
}

impl LaplacianOperator {
    pub fn new(g: &WeightedGraph) -> Result<Self, SpectralError> {
        let n = g.node_count();
        if n == 0 {
            return Err(SpectralError::EmptyGraph);
        }
        let mut inv_sqrt_deg = Vec::with_capacity(n);
        for u in 0..n {
            let d = g.degree(u);
            if d <= 0.0 {
                return Err(SpectralError::IsolatedVertex(u));
            }
            inv_sqrt_deg.push(1.0 / sqrt(d));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut scaled = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for u in 0..n {
            for &(v, w) in g.neighbors(u) {
                scaled.push((v, w * inv_sqrt_deg[u] * inv_sqrt_deg[v]));
            }
            offsets.push(scaled.len());
        }
        Ok(Self {
            n,
            edge_count: g.edge_count(),
            offsets,
            scaled,
            inv_sqrt_deg,
            degrees: g.degrees().to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn inv_sqrt_degrees(&self) -> &[f64] {
        &self.inv_sqrt_deg
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// y = D^{−1/2} A D^{−1/2} x in one adjacency sweep.
    fn neighbor_average(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for u in 0..self.n {
            let mut acc = 0.0;
            for &(v, w) in &self.scaled[self.offsets[u]..self.offsets[u + 1]] {
                acc += w * x[v];
            }
            y[u] = acc;
        }
        y
    }

    /// 𝓛x = x − D^{−1/2} A D^{−1/2} x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.neighbor_average(x);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi - *yi;
        }
        y
    }

    /// Px = x − 𝓛x/2, the lazy-random-walk update.
    pub fn apply_lazy_walk(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.neighbor_average(x);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = 0.5 * xi + 0.5 * *yi;
        }
        y
    }

    /// Dense 𝓛 for the small-graph path and for oracle checks.
    pub fn dense_laplacian(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.n);
        for u in 0..self.n {
            m.set(u, u, 1.0);
            for &(v, w) in &self.scaled[self.offsets[u]..self.offsets[u + 1]] {
                if v > u {
                    m.set(u, v, -w);
                }
            }
        }
        m
    }
}

/// Bottom eigenpairs of 𝓛, ascending, with per-pair residuals ‖𝓛f − λf‖.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigMethod {
    /// Dense for n ≤ [`DENSE_EIGEN_MAX_N`], subspace iteration above.
    Auto,
    Dense,
    Subspace,
}

#[derive(Debug, Clone)]
pub struct EigOptions {
    pub tol: f64,
    /// Iteration cap for the subspace path; 0 means the 10·n default.
    pub max_iters: usize,
    pub method: EigMethod,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: 0,
            method: EigMethod::Auto,
        }
    }
}

pub fn bottom_eigenpairs(
    g: &WeightedGraph,
    j: usize,
    tol: f64,
) -> Result<Spectrum, SpectralError> {
    bottom_eigenpairs_with(
        g,
        j,
        &EigOptions {
            tol,
            ..EigOptions::default()
        },
    )
}

pub fn bottom_eigenpairs_with(
    g: &WeightedGraph,
    j: usize,
    opts: &EigOptions,
) -> Result<Spectrum, SpectralError> {
    let op = LaplacianOperator::new(g)?;
    operator_eigenpairs(&op, j, opts)
}

pub fn operator_eigenpairs(
    op: &LaplacianOperator,
    j: usize,
    opts: &EigOptions,
) -> Result<Spectrum, SpectralError> {
    let n = op.n();
    if j > n {
        return Err(SpectralError::TooManyPairs { requested: j, n });
    }
    if j == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            residuals: Vec::new(),
        });
    }
    let dense = match opts.method {
        EigMethod::Dense => true,
        EigMethod::Subspace => false,
        EigMethod::Auto => n <= DENSE_EIGEN_MAX_N,
    };
    if dense {
        dense_bottom_pairs(op, j, opts.tol)
    } else {
        subspace_bottom_pairs(op, j, opts)
    }
}

fn residual_norm(op: &LaplacianOperator, vec: &[f64], value: f64) -> f64 {
    let lv = op.apply(vec);
    let mut acc = 0.0;
    for (l, x) in lv.iter().zip(vec) {
        let r = l - value * x;
        acc += r * r;
    }
    sqrt(acc)
}

fn dense_bottom_pairs(
    op: &LaplacianOperator,
    j: usize,
    tol: f64,
) -> Result<Spectrum, SpectralError> {
    let m = op.dense_laplacian();
    let eig = jacobi_eigen(&m, 1e-14, 50);
    let eigenvalues: Vec<f64> = eig.values[..j].to_vec();
    let eigenvectors: Vec<Vec<f64>> = eig.vectors[..j].to_vec();
    let residuals: Vec<f64> = eigenvectors
        .iter()
        .zip(&eigenvalues)
        .map(|(v, &l)| residual_norm(op, v, l))
        .collect();
    let worst = residuals.iter().fold(0.0f64, |a, &r| a.max(r));
    if worst > tol {
        return Err(SpectralError::NonConvergence {
            best_residual: worst,
            iterations: 0,
        });
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Modified Gram-Schmidt on a column block; columns that collapse to zero are
/// replaced with fresh deterministic pseudo-random directions so the block
/// keeps full rank (P is singular on bipartite graphs).
fn orthonormalize(block: &mut [Vec<f64>], reseed_counter: &mut u64) {
    let b = block.len();
    for c in 0..b {
        for _pass in 0..2 {
            for prev in 0..c {
                let dot: f64 = block[c].iter().zip(&block[prev]).map(|(x, y)| x * y).sum();
                let prev_col = block[prev].clone();
                for (x, p) in block[c].iter_mut().zip(&prev_col) {
                    *x -= dot * p;
                }
            }
        }
        let mut norm: f64 = sqrt(block[c].iter().map(|x| x * x).sum());
        if norm < 1e-150 {
            *reseed_counter += 1;
            let mut rng = Rng::stream(SUBSPACE_INIT_SEED, &[0xdead, *reseed_counter]);
            for x in block[c].iter_mut() {
                *x = rng.uniform(-1.0, 1.0);
            }
            for prev in 0..c {
                let dot: f64 = block[c].iter().zip(&block[prev]).map(|(x, y)| x * y).sum();
                let prev_col = block[prev].clone();
                for (x, p) in block[c].iter_mut().zip(&prev_col) {
                    *x -= dot * p;
                }
            }
            norm = sqrt(block[c].iter().map(|x| x * x).sum());
        }
        for x in block[c].iter_mut() {
            *x /= norm;
        }
    }
}

/// Subspace iteration on P = I − 𝓛/2: the largest eigenvalues of P are the
/// smallest of 𝓛. Rayleigh-Ritz on 𝓛 extracts the pairs; stopping is
/// residual-based on the first `j` Ritz pairs.
fn subspace_bottom_pairs(
    op: &LaplacianOperator,
    j: usize,
    opts: &EigOptions,
) -> Result<Spectrum, SpectralError> {
    let n = op.n();
    let block_size = (j + 4).min(n);
    let max_iters = if opts.max_iters == 0 {
        10 * n
    } else {
        opts.max_iters
    };
    let check_every = 5;

    let mut init_rng = Rng::stream(SUBSPACE_INIT_SEED, &[n as u64, j as u64]);
    let mut block: Vec<Vec<f64>> = (0..block_size)
        .map(|_| (0..n).map(|_| init_rng.uniform(-1.0, 1.0)).collect())
        .collect();
    let mut reseed_counter = 0u64;
    orthonormalize(&mut block, &mut reseed_counter);

    let mut best_residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iters {
        let steps = check_every.min(max_iters - iterations);
        for _ in 0..steps {
            for col in block.iter_mut() {
                *col = op.apply_lazy_walk(col);
            }
            orthonormalize(&mut block, &mut reseed_counter);
            iterations += 1;
        }

        // Rayleigh-Ritz on 𝓛 over span(block).
        let applied: Vec<Vec<f64>> = block.iter().map(|col| op.apply(col)).collect();
        let mut small = SymMatrix::zeros(block_size);
        for a in 0..block_size {
            for b in a..block_size {
                let dot: f64 = block[a].iter().zip(&applied[b]).map(|(x, y)| x * y).sum();
                small.set(a, b, dot);
            }
        }
        let ritz = jacobi_eigen(&small, 1e-14, 50);

        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(j);
        let mut values: Vec<f64> = Vec::with_capacity(j);
        for r in 0..j {
            let mut v = vec![0.0; n];
            for (c, col) in block.iter().enumerate() {
                let coeff = ritz.vectors[r][c];
                for (vi, xi) in v.iter_mut().zip(col) {
                    *vi += coeff * xi;
                }
            }
            values.push(ritz.values[r]);
            vectors.push(v);
        }
        let residuals: Vec<f64> = vectors
            .iter()
            .zip(&values)
            .map(|(v, &l)| residual_norm(op, v, l))
            .collect();
        let worst = residuals.iter().fold(0.0f64, |a, &r| a.max(r));
        if worst < best_residual {
            best_residual = worst;
        }
        if worst <= opts.tol {
            return Ok(Spectrum {
                eigenvalues: values,
                eigenvectors: vectors,
                residuals,
            });
        }
    }

    Err(SpectralError::NonConvergence {
        best_residual,
        iterations,
    })
}

/// Spectral-gap summary around a target cluster count k.
#[derive(Debug, Clone)]
pub struct GapEstimate {
    pub k: usize,
    pub lambda_k: f64,
    pub lambda_k_plus_1: f64,
    pub gap: f64,
    /// λ_{k+1} / max_i φ(A_i) of a reference partition, when one is given.
    /// The true k-way expansion is not computable, so this is a proxy.
    pub upsilon_proxy: Option<f64>,
}

pub fn estimate_gap(
    g: &WeightedGraph,
    k: usize,
    reference: Option<&Partition>,
) -> Result<GapEstimate, SpectralError> {
    estimate_gap_with(g, k, reference, &EigOptions::default())
}

pub fn estimate_gap_with(
    g: &WeightedGraph,
    k: usize,
    reference: Option<&Partition>,
    opts: &EigOptions,
) -> Result<GapEstimate, SpectralError> {
    if k == 0 {
        return Err(SpectralError::InvalidK { got: 0, min: 1 });
    }
    if k + 1 > g.node_count() {
        return Err(SpectralError::TooManyPairs {
            requested: k + 1,
            n: g.node_count(),
        });
    }
    let spectrum = bottom_eigenpairs_with(g, k + 1, opts)?;
    let lambda_k = spectrum.eigenvalues[k - 1];
    let lambda_k_plus_1 = spectrum.eigenvalues[k];
    let upsilon_proxy = match reference {
        Some(p) => {
            let rho = partition_max_conductance(g, p).map_err(SpectralError::InvalidReference)?;
            Some(if rho > 0.0 {
                lambda_k_plus_1 / rho
            } else {
                f64::INFINITY
            })
        }
        None => None,
    };
    Ok(GapEstimate {
        k,
        lambda_k,
        lambda_k_plus_1,
        gap: lambda_k_plus_1 - lambda_k,
        upsilon_proxy,
    })
}

/// Row-normalized bottom-k eigenvector embedding. Zero-norm rows are left at
/// the origin rather than normalized.
pub fn spectral_embedding(
    g: &WeightedGraph,
    k: usize,
    opts: &EigOptions,
) -> Result<Vec<Vec<f64>>, SpectralError> {
    let spectrum = bottom_eigenpairs_with(g, k, opts)?;
    Ok(embed_rows(&spectrum, g.node_count()))
}

fn embed_rows(spectrum: &Spectrum, n: usize) -> Vec<Vec<f64>> {
    let k = spectrum.eigenvectors.len();
    let mut rows = vec![vec![0.0; k]; n];
    for (c, vec_c) in spectrum.eigenvectors.iter().enumerate() {
        for (row, &x) in rows.iter_mut().zip(vec_c) {
            row[c] = x;
        }
    }
    for row in rows.iter_mut() {
        let norm: f64 = sqrt(row.iter().map(|x| x * x).sum());
        if norm > 0.0 {
            for x in row.iter_mut() {
                *x /= norm;
            }
        }
    }
    rows
}

/// Classical spectral clustering: bottom-k embedding, row normalization,
/// k-means (k-means++ seeding, 10 restarts). Deterministic given seed.
pub fn spectral_cluster(
    g: &WeightedGraph,
    k: usize,
    seed: u64,
) -> Result<Partition, SpectralError> {
    spectral_cluster_with(g, k, seed, &EigOptions::default())
}

pub fn spectral_cluster_with(
    g: &WeightedGraph,
    k: usize,
    seed: u64,
    opts: &EigOptions,
) -> Result<Partition, SpectralError> {
    if k < 2 {
        return Err(SpectralError::InvalidK { got: k, min: 2 });
    }
    if k > g.node_count() {
        return Err(SpectralError::TooManyPairs {
            requested: k,
            n: g.node_count(),
        });
    }
    let rows = spectral_embedding(g, k, opts)?;
    let result = kmeans(&rows, k, seed)?;
    Ok(Partition::from_labels(k, result.assignment).expect("kmeans labels in range"))
}
