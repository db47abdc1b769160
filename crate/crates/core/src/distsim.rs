//! Round-synchronous simulator of the seeding / averaging / query protocol.
//!
//! Each active seed contributes one state vector, initialized to the
//! degree-normalized indicator χ_v of its node. Every averaging round applies
//! the lazy-walk matrix P = I − 𝓛/2 to all vectors synchronously
//! (double-buffered: round-t values depend on round-(t−1) only) and charges
//! 2·m·s words: every node sends its s coordinates across each incident
//! edge. The query step labels each node with the smallest vector index
//! whose value clears √d_v / (2β·vol(V)); nodes clearing none stay
//! unlabeled and count as misclassified.

use crate::graph::{GraphError, Partition, WeightedGraph};
use crate::rng::Rng;
use crate::spectral::{operator_eigenpairs, EigOptions, LaplacianOperator, SpectralError};
use alloc::vec;
use alloc::vec::Vec;
use libm::{ceil, log, sqrt};
use thiserror::Error;

const SEEDING_STREAM_TAG: u64 = 0x7365_6564;
/// Hard cap on simulated rounds; reaching it means the gap-driven schedule
/// diverged.
const MAX_ROUNDS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("beta must lie in (0, 1], got {0}")]
    InvalidBeta(f64),
    #[error("round count must be at least 1")]
    InvalidRounds,
    #[error("volume estimate must be positive, got {0}")]
    InvalidVolumeEstimate(f64),
    #[error("seeding produced no active nodes; retry with another seed")]
    NoSeeds,
    #[error("lambda_(k+1) = {lambda:.3e} is too small to schedule rounds")]
    GapTooSmall { lambda: f64 },
    #[error("state vector length does not match the graph")]
    StateMismatch,
    #[error("ground truth partition is unusable: {0}")]
    InvalidTruth(GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rounds {
    /// ⌈c·ln n / λ̂_{k+1}⌉ when a cluster-count hint is set, ⌈c·ln n⌉ otherwise.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Lower bound β on cluster volume as a fraction of vol(V).
    pub beta: f64,
    /// Target cluster count; drives the Auto round schedule.
    pub k_hint: Option<usize>,
    pub rounds: Rounds,
    /// The constant in T = ⌈c·ln n / λ̂_{k+1}⌉.
    pub round_multiplier: f64,
    /// The constant a in s̄ = ⌈(a/β)·ln(1/β)⌉.
    pub seed_multiplier: f64,
    pub seed: u64,
    /// vol(V) as known to the nodes; None uses the exact value.
    pub vol_estimate: Option<f64>,
}

impl SimConfig {
    pub fn new(beta: f64, seed: u64) -> Self {
        Self {
            beta,
            k_hint: None,
            rounds: Rounds::Auto,
            round_multiplier: 1.0,
            seed_multiplier: 1.0,
            seed,
            vol_estimate: None,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(SimError::InvalidBeta(self.beta));
        }
        if let Some(v) = self.vol_estimate {
            if !(v > 0.0) {
                return Err(SimError::InvalidVolumeEstimate(v));
            }
        }
        if self.rounds == Rounds::Fixed(0) {
            return Err(SimError::InvalidRounds);
        }
        Ok(())
    }

    /// Expected number of active seeds s̄ = ⌈(a/β)·ln(1/β)⌉, at least 1.
    pub fn expected_seeds(&self) -> usize {
        let raw = ceil(self.seed_multiplier / self.beta * log(1.0 / self.beta));
        if raw < 1.0 {
            1
        } else {
            raw as usize
        }
    }

    fn volume(&self, g: &WeightedGraph) -> f64 {
        self.vol_estimate.unwrap_or_else(|| g.total_volume())
    }
}

/// Per-seed diffusion vectors at some round.
#[derive(Debug, Clone)]
pub struct DiffusionState {
    seed_nodes: Vec<usize>,
    /// vectors[i][v] = x^{(t, i)}(v).
    vectors: Vec<Vec<f64>>,
    round: usize,
}

impl DiffusionState {
    pub fn from_vectors(
        seed_nodes: Vec<usize>,
        vectors: Vec<Vec<f64>>,
        round: usize,
    ) -> Result<Self, SimError> {
        if seed_nodes.len() != vectors.len() {
            return Err(SimError::StateMismatch);
        }
        let n = vectors.first().map(Vec::len).unwrap_or(0);
        if vectors.iter().any(|x| x.len() != n) {
            return Err(SimError::StateMismatch);
        }
        Ok(Self {
            seed_nodes,
            vectors,
            round,
        })
    }

    pub fn seed_count(&self) -> usize {
        self.seed_nodes.len()
    }

    pub fn seed_nodes(&self) -> &[usize] {
        &self.seed_nodes
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Σ_v √d_v · x(v) per vector; conserved exactly by the update rule.
    pub fn measures(&self, g: &WeightedGraph) -> Vec<f64> {
        let sqrt_deg: Vec<f64> = g.degrees().iter().map(|&d| sqrt(d)).collect();
        self.vectors
            .iter()
            .map(|x| x.iter().zip(&sqrt_deg).map(|(v, s)| v * s).sum())
            .collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|x| sqrt(x.iter().map(|v| v * v).sum()))
            .collect()
    }
}

/// Each node activates independently with probability min{1, s̄·d_v/vol(V)}
/// and starts a vector at its own indicator χ_v.
pub fn seeding(g: &WeightedGraph, cfg: &SimConfig) -> Result<DiffusionState, SimError> {
    cfg.validate()?;
    let vol = cfg.volume(g);
    if !(vol > 0.0) {
        return Err(SimError::InvalidVolumeEstimate(vol));
    }
    let sbar = cfg.expected_seeds() as f64;
    let n = g.node_count();
    let mut seed_nodes = Vec::new();
    for v in 0..n {
        let p = (sbar * g.degree(v) / vol).min(1.0);
        if p > 0.0 && Rng::stream(cfg.seed, &[SEEDING_STREAM_TAG, v as u64]).next_f64() < p {
            seed_nodes.push(v);
        }
    }
    if seed_nodes.is_empty() {
        return Err(SimError::NoSeeds);
    }
    let vectors = seed_nodes
        .iter()
        .map(|&v| {
            let mut x = vec![0.0; n];
            x[v] = 1.0 / sqrt(g.degree(v));
            x
        })
        .collect();
    DiffusionState::from_vectors(seed_nodes, vectors, 0)
}

/// One synchronous averaging round: every vector moves to Px.
pub fn averaging_round(
    g: &WeightedGraph,
    st: &DiffusionState,
) -> Result<DiffusionState, SimError> {
    if st.vectors.iter().any(|x| x.len() != g.node_count()) {
        return Err(SimError::StateMismatch);
    }
    let op = LaplacianOperator::new(g)?;
    Ok(averaging_round_with(&op, st))
}

pub fn averaging_round_with(op: &LaplacianOperator, st: &DiffusionState) -> DiffusionState {
    let vectors = st
        .vectors
        .iter()
        .map(|x| op.apply_lazy_walk(x))
        .collect();
    DiffusionState {
        seed_nodes: st.seed_nodes.clone(),
        vectors,
        round: st.round + 1,
    }
}

/// Per-node labels; indices refer to positions in the active-seed list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    labels: Vec<Option<usize>>,
    seed_count: usize,
}

impl LabelAssignment {
    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.labels[v]
    }

    pub fn seed_count(&self) -> usize {
        self.seed_count
    }

    pub fn unlabeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }
}

/// ℓ_v = min{ i | x^{(t,i)}(v) ≥ √d_v / (2β·vol(V)) }, or unlabeled if no
/// vector qualifies.
pub fn query_labels(
    g: &WeightedGraph,
    st: &DiffusionState,
    cfg: &SimConfig,
) -> Result<LabelAssignment, SimError> {
    cfg.validate()?;
    let n = g.node_count();
    if st.vectors.iter().any(|x| x.len() != n) {
        return Err(SimError::StateMismatch);
    }
    let vol = cfg.volume(g);
    let denom = 2.0 * cfg.beta * vol;
    let labels = (0..n)
        .map(|v| {
            let threshold = sqrt(g.degree(v)) / denom;
            st.vectors.iter().position(|x| x[v] >= threshold)
        })
        .collect();
    Ok(LabelAssignment {
        labels,
        seed_count: st.seed_count(),
    })
}

/// Volume of nodes whose label disagrees with their cluster's
/// plurality-volume label, plus all unlabeled volume. Each ground-truth
/// cluster is mapped to the label carrying the most volume inside it; this
/// generalizes the label permutation, since several seeds can land in one
/// cluster.
pub fn misclassified_volume(
    g: &WeightedGraph,
    truth: &Partition,
    labels: &LabelAssignment,
) -> Result<f64, SimError> {
    if truth.len() != g.node_count() {
        return Err(SimError::InvalidTruth(GraphError::SizeMismatch {
            got: truth.len(),
            expected: g.node_count(),
        }));
    }
    if !truth.is_fully_assigned() {
        return Err(SimError::InvalidTruth(GraphError::NotFullyAssigned));
    }
    let k = truth.k();
    let s = labels.seed_count();
    let mut label_volume = vec![vec![0.0f64; s]; k];
    for v in 0..g.node_count() {
        if let (Some(c), Some(l)) = (truth.part_of(v), labels.label_of(v)) {
            label_volume[c][l] += g.degree(v);
        }
    }
    let cluster_label: Vec<Option<usize>> = label_volume
        .iter()
        .map(|per_label| {
            let mut best: Option<(usize, f64)> = None;
            for (l, &vol) in per_label.iter().enumerate() {
                if vol > 0.0 && best.map(|(_, b)| vol > b).unwrap_or(true) {
                    best = Some((l, vol));
                }
            }
            best.map(|(l, _)| l)
        })
        .collect();
    let mut bad = 0.0;
    for v in 0..g.node_count() {
        let c = truth.part_of(v).expect("fully assigned");
        match labels.label_of(v) {
            Some(l) if Some(l) == cluster_label[c] => {}
            _ => bad += g.degree(v),
        }
    }
    Ok(bad)
}

/// Full transcript of one protocol run.
#[derive(Debug, Clone)]
pub struct SimTranscript {
    pub beta: f64,
    pub seed: u64,
    pub rounds: usize,
    pub seed_count: usize,
    pub seed_nodes: Vec<usize>,
    pub words_per_round: Vec<u64>,
    pub total_words: u64,
    pub labels: LabelAssignment,
    pub unlabeled_count: usize,
    pub misclassified_volume: Option<f64>,
    pub volume: f64,
    /// Worst relative drift of Σ √d_v·x(v) across all rounds and vectors.
    pub max_conservation_drift: f64,
    /// Worst relative per-round growth of any vector norm (≤ 0 when norms
    /// only shrink).
    pub max_norm_growth: f64,
}

/// Number of averaging rounds the config resolves to on this graph.
pub fn resolve_rounds(g: &WeightedGraph, cfg: &SimConfig) -> Result<usize, SimError> {
    cfg.validate()?;
    let n = g.node_count().max(2);
    match cfg.rounds {
        Rounds::Fixed(t) => {
            if t == 0 {
                Err(SimError::InvalidRounds)
            } else {
                Ok(t)
            }
        }
        Rounds::Auto => {
            let log_n = log(n as f64);
            let t = match cfg.k_hint {
                Some(k) => {
                    let opts = EigOptions::default();
                    let op = LaplacianOperator::new(g)?;
                    let spectrum = operator_eigenpairs(&op, k + 1, &opts)?;
                    let lambda = spectrum.eigenvalues[k];
                    let t = ceil(cfg.round_multiplier * log_n / lambda);
                    if !(lambda > 0.0) || !t.is_finite() || t > MAX_ROUNDS as f64 {
                        return Err(SimError::GapTooSmall { lambda });
                    }
                    t
                }
                None => ceil(cfg.round_multiplier * log_n),
            };
            Ok((t as usize).max(1))
        }
    }
}

/// Seeding, T averaging rounds, query, with word accounting and invariant
/// tracking. When `ground_truth` is supplied the transcript carries the
/// misclassified volume.
pub fn run_protocol(
    g: &WeightedGraph,
    cfg: &SimConfig,
    ground_truth: Option<&Partition>,
) -> Result<SimTranscript, SimError> {
    cfg.validate()?;
    let op = LaplacianOperator::new(g)?;
    let rounds = resolve_rounds(g, cfg)?;
    let mut state = seeding(g, cfg)?;
    let s = state.seed_count();
    let m = g.edge_count() as u64;
    let words_each_round = 2 * m * s as u64;

    let baseline_measures = state.measures(g);
    let mut prev_norms = state.norms();
    let mut max_drift = 0.0f64;
    let mut max_growth = f64::NEG_INFINITY;

    let mut words_per_round = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        state = averaging_round_with(&op, &state);
        words_per_round.push(words_each_round);

        let measures = state.measures(g);
        for (m_now, m_0) in measures.iter().zip(&baseline_measures) {
            let scale = m_0.abs().max(1e-300);
            let drift = (m_now - m_0).abs() / scale;
            if drift > max_drift {
                max_drift = drift;
            }
        }
        let norms = state.norms();
        for (now, before) in norms.iter().zip(&prev_norms) {
            let growth = (now - before) / before.max(1e-300);
            if growth > max_growth {
                max_growth = growth;
            }
        }
        prev_norms = norms;
    }

    let labels = query_labels(g, &state, cfg)?;
    let unlabeled_count = labels.unlabeled_count();
    let mis = match ground_truth {
        Some(truth) => Some(misclassified_volume(g, truth, &labels)?),
        None => None,
    };
    let total_words = words_each_round * rounds as u64;
    Ok(SimTranscript {
        beta: cfg.beta,
        seed: cfg.seed,
        rounds,
        seed_count: s,
        seed_nodes: state.seed_nodes().to_vec(),
        words_per_round,
        total_words,
        labels,
        unlabeled_count,
        misclassified_volume: mis,
        volume: g.total_volume(),
        max_conservation_drift: max_drift,
        max_norm_growth: if max_growth == f64::NEG_INFINITY {
            0.0
        } else {
            max_growth
        },
    })
}
