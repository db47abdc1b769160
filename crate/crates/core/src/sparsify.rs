//! Cluster-preserving edge sampling.
//!
//! Each endpoint u of an edge {u, v} samples it independently with
//! probability p_u(v) = min{w(u,v)·τ·log₂ n / d_u, 1}; the edge survives if
//! either endpoint samples it, and surviving edges are reweighted by the
//! union probability p_e = p_u(v) + p_v(u) − p_u(v)·p_v(u) so every edge
//! weight stays unbiased. One word of communication is counted per kept
//! edge: in the distributed reading, u and v talk only when the edge is
//! sampled.
//!
//! τ is tuned by doubling: starting at 0.1, double until the spectral gap
//! λ_{k+1} − λ_k of the sampled graph moves by less than 10% between
//! consecutive values.

use crate::graph::WeightedGraph;
use crate::rng::{mix, Rng};
use crate::spectral::{estimate_gap_with, EigOptions, SpectralError};
use alloc::vec::Vec;
use libm::log2;
use thiserror::Error;

const EDGE_STREAM_TAG: u64 = 0x7370_6172_7365;

#[derive(Debug, Error, PartialEq)]
pub enum SparsifyError {
    #[error("tau must be positive, got {0}")]
    InvalidTau(f64),
    #[error("({u}, {v}) is not an edge")]
    NonEdge { u: usize, v: usize },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("cluster count k = {k} needs k + 1 <= n = {n}")]
    BadClusterCount { k: usize, n: usize },
    #[error("tau doubling search exhausted (cap {cap})")]
    SearchExhausted { cap: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SparsifyConfig {
    pub tau: f64,
    pub seed: u64,
    /// Record (u, v, p_e) per original edge in the output, for audits.
    pub record_probabilities: bool,
}

impl SparsifyConfig {
    pub fn new(tau: f64, seed: u64) -> Self {
        Self {
            tau,
            seed,
            record_probabilities: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SparsifierOutput {
    /// The sampled, reweighted subgraph on the same node set.
    pub h: WeightedGraph,
    pub kept_edges: usize,
    /// One word per kept edge.
    pub words_exchanged: u64,
    /// Σ_e p_e over the original edges (the expected kept-edge count).
    pub sum_edge_probability: f64,
    pub per_edge_prob: Option<Vec<(usize, usize, f64)>>,
}

/// p_u(v) = min{w(u,v) · τ·log₂ n / d_u, 1}, the probability that endpoint
/// u samples its incident edge {u, v}. Base-2 logs reproduce the reference
/// edge-fraction behaviour; any other base is a constant folded into τ.
pub fn sample_probability(
    g: &WeightedGraph,
    u: usize,
    v: usize,
    cfg: &SparsifyConfig,
) -> Result<f64, SparsifyError> {
    if !(cfg.tau > 0.0) {
        return Err(SparsifyError::InvalidTau(cfg.tau));
    }
    let w = g.edge_weight(u, v).ok_or(SparsifyError::NonEdge { u, v })?;
    let tau_log_n = cfg.tau * log2(g.node_count() as f64);
    Ok(endpoint_probability(w, g.degree(u), tau_log_n))
}

#[inline]
fn endpoint_probability(w: f64, degree: f64, tau_log_n: f64) -> f64 {
    let p = w * tau_log_n / degree;
    if p > 1.0 {
        1.0
    } else {
        p
    }
}

/// p_e = p + q − p·q, the probability that at least one endpoint samples.
pub fn union_probability(p_uv: f64, p_vu: f64) -> Result<f64, SparsifyError> {
    for p in [p_uv, p_vu] {
        if !(0.0..=1.0).contains(&p) {
            return Err(SparsifyError::ProbabilityOutOfRange(p));
        }
    }
    Ok(p_uv + p_vu - p_uv * p_vu)
}

/// Sample every edge by two independent endpoint draws and reweight the
/// survivors by 1/p_e. Deterministic given the seed: each (edge, endpoint)
/// pair has its own RNG stream, so the result does not depend on edge
/// iteration order.
pub fn sparsify(g: &WeightedGraph, cfg: &SparsifyConfig) -> Result<SparsifierOutput, SparsifyError> {
    if !(cfg.tau > 0.0) {
        return Err(SparsifyError::InvalidTau(cfg.tau));
    }
    let n = g.node_count();
    let tau_log_n = cfg.tau * log2(n as f64);
    let mut kept = Vec::new();
    let mut sum_pe = 0.0;
    let mut probs = if cfg.record_probabilities {
        Some(Vec::with_capacity(g.edge_count()))
    } else {
        None
    };
    for e in g.edges() {
        let p_uv = endpoint_probability(e.w, g.degree(e.u), tau_log_n);
        let p_vu = endpoint_probability(e.w, g.degree(e.v), tau_log_n);
        let p_e = p_uv + p_vu - p_uv * p_vu;
        sum_pe += p_e;
        if let Some(list) = probs.as_mut() {
            list.push((e.u, e.v, p_e));
        }
        let u_draws =
            Rng::new(mix(cfg.seed, &[EDGE_STREAM_TAG, e.u as u64, e.v as u64, 0])).next_f64()
                < p_uv;
        let v_draws =
            Rng::new(mix(cfg.seed, &[EDGE_STREAM_TAG, e.u as u64, e.v as u64, 1])).next_f64()
                < p_vu;
        if u_draws || v_draws {
            kept.push((e.u, e.v, e.w / p_e));
        }
    }
    let kept_edges = kept.len();
    let h = WeightedGraph::from_edges(n, kept).expect("kept edges are a valid subgraph");
    Ok(SparsifierOutput {
        h,
        kept_edges,
        words_exchanged: kept_edges as u64,
        sum_edge_probability: sum_pe,
        per_edge_prob: probs,
    })
}

#[derive(Debug, Clone)]
pub struct TauSearchOptions {
    pub start_tau: f64,
    /// Relative gap change below which two consecutive τ values count as stable.
    pub stability: f64,
    /// Search fails once τ exceeds this; defaults to n.
    pub tau_cap: Option<f64>,
    pub eig: EigOptions,
}

impl Default for TauSearchOptions {
    fn default() -> Self {
        Self {
            start_tau: 0.1,
            stability: 0.1,
            tau_cap: None,
            eig: EigOptions::default(),
        }
    }
}

impl TauSearchOptions {
    fn eig_options(&self) -> EigOptions {
        self.eig.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TauStep {
    pub tau: f64,
    /// λ_{k+1} − λ_k of the sampled graph; None when it could not be
    /// evaluated (isolated nodes or eigensolver failure at tiny τ).
    pub gap: Option<f64>,
}

#[derive(Debug)]
pub struct TauSearchResult {
    pub tau: f64,
    pub output: SparsifierOutput,
    pub steps: Vec<TauStep>,
}

pub fn tau_doubling_search(
    g: &WeightedGraph,
    k: usize,
    seed: u64,
) -> Result<TauSearchResult, SparsifyError> {
    tau_doubling_search_with(g, k, seed, &TauSearchOptions::default())
}

/// Doubling search for τ: sample at τ, 2τ, ... (same seed, so the kept edge
/// sets are nested) and return the first τ whose gap is within `stability`
/// of the next doubling, together with its sparsifier.
pub fn tau_doubling_search_with(
    g: &WeightedGraph,
    k: usize,
    seed: u64,
    opts: &TauSearchOptions,
) -> Result<TauSearchResult, SparsifyError> {
    let n = g.node_count();
    if k == 0 || k + 1 > n {
        return Err(SparsifyError::BadClusterCount { k, n });
    }
    let cap = opts.tau_cap.unwrap_or(n as f64);
    let eig = opts.eig_options();

    let mut steps = Vec::new();
    let mut prev: Option<(f64, SparsifierOutput, f64)> = None;
    let mut tau = opts.start_tau;
    while tau <= cap {
        let output = sparsify(g, &SparsifyConfig::new(tau, seed))?;
        let gap = if output.h.has_isolated_nodes() {
            None
        } else {
            match estimate_gap_with(&output.h, k, None, &eig) {
                Ok(est) => Some(est.gap),
                Err(SpectralError::NonConvergence { .. }) => None,
                Err(_) => None,
            }
        };
        steps.push(TauStep { tau, gap });

        if let (Some((_, _, prev_gap)), Some(cur_gap)) = (&prev, gap) {
            if *prev_gap > 0.0 && ((cur_gap - prev_gap) / prev_gap).abs() < opts.stability {
                let (tau, output, _) = prev.unwrap();
                return Ok(TauSearchResult { tau, output, steps });
            }
        }
        prev = gap.map(|gp| (tau, output, gp));
        tau *= 2.0;
    }
    Err(SparsifyError::SearchExhausted { cap })
}
