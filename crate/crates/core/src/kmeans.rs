//! Lloyd's k-means with k-means++ seeding and restarts.
//!
//! Used by the spectral-clustering baseline on embedding rows. Everything is
//! deterministic given (points, k, seed): restarts draw from per-restart
//! sub-streams, nearest-center ties break toward the lowest index, and empty
//! clusters are re-seeded at the point farthest from its current center.

use crate::rng::Rng;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KMeansError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no input points")]
    NoPoints,
    #[error("points have inconsistent dimensions")]
    DimensionMismatch,
    #[error("k = {k} exceeds the {distinct} distinct input points")]
    TooFewDistinctPoints { distinct: usize, k: usize },
    #[error("could not repair empty clusters within the retry budget")]
    EmptyClusterUnrecoverable,
}

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Empty-cluster repairs allowed per restart before giving up on it.
    pub reseed_budget: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 100,
            reseed_budget: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Objective after each Lloyd update of the winning restart.
    pub inertia_trace: Vec<f64>,
}

pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult, KMeansError> {
    kmeans_with(points, k, seed, &KMeansConfig::default())
}

pub fn kmeans_with(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    cfg: &KMeansConfig,
) -> Result<KMeansResult, KMeansError> {
    if k == 0 {
        return Err(KMeansError::ZeroK);
    }
    if points.is_empty() {
        return Err(KMeansError::NoPoints);
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(KMeansError::DimensionMismatch);
    }
    let distinct = count_distinct(points);
    if distinct < k {
        return Err(KMeansError::TooFewDistinctPoints { distinct, k });
    }

    let mut best: Option<KMeansResult> = None;
    for restart in 0..cfg.restarts.max(1) {
        let mut rng = Rng::stream(seed, &[0x6b6d_6561_6e73, restart as u64]);
        if let Some(run) = lloyd_run(points, k, &mut rng, cfg) {
            let better = match &best {
                Some(b) => run.inertia < b.inertia,
                None => true,
            };
            if better {
                best = Some(run);
            }
        }
    }
    best.ok_or(KMeansError::EmptyClusterUnrecoverable)
}

fn count_distinct(points: &[Vec<f64>]) -> usize {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    let mut distinct = 1;
    for w in order.windows(2) {
        if lex_cmp(&points[w[0]], &points[w[1]]) != core::cmp::Ordering::Equal {
            distinct += 1;
        }
    }
    distinct
}

fn lex_cmp(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.total_cmp(y);
        if ord != core::cmp::Ordering::Equal {
            return ord;
        }
    }
    core::cmp::Ordering::Equal
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// k-means++ seeding: first center uniform, then distance-squared weighted.
fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.below(n)].clone());
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let idx = rng.weighted_index(&dist);
        centers.push(points[idx].clone());
        let newest = centers.last().unwrap();
        for (d, p) in dist.iter_mut().zip(points) {
            let cand = sq_dist(p, newest);
            if cand < *d {
                *d = cand;
            }
        }
    }
    centers
}

fn nearest_center(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    (best, best_d)
}

fn lloyd_run(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut Rng,
    cfg: &KMeansConfig,
) -> Option<KMeansResult> {
    let n = points.len();
    let dim = points[0].len();
    let mut centers = plus_plus_init(points, k, rng);
    let mut assignment = vec![0usize; n];
    let mut trace = Vec::new();
    let mut reseeds = 0usize;

    for _ in 0..cfg.max_iters {
        let mut changed = false;
        let mut inertia = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest_center(p, &centers);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
            inertia += d;
        }
        trace.push(inertia);

        let mut sums = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i];
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }

        let mut repaired = false;
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums[c].iter_mut() {
                    *s /= counts[c] as f64;
                }
                centers[c] = core::mem::take(&mut sums[c]);
            } else {
                // Empty cluster: restart this center at the point farthest
                // from its assigned center.
                reseeds += 1;
                if reseeds > cfg.reseed_budget {
                    return None;
                }
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(&points[a], &centers[assignment[a]]);
                        let db = sq_dist(&points[b], &centers[assignment[b]]);
                        da.total_cmp(&db)
                    })
                    .unwrap();
                centers[c] = points[far].clone();
                repaired = true;
            }
        }

        if !changed && !repaired {
            break;
        }
    }

    let mut inertia = 0.0;
    for (i, p) in points.iter().enumerate() {
        let (c, d) = nearest_center(p, &centers);
        assignment[i] = c;
        inertia += d;
    }
    trace.push(inertia);

    Some(KMeansResult {
        assignment,
        centers,
        inertia,
        inertia_trace: trace,
    })
}
