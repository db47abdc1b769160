//! Clustering-quality metrics: misclassification ratio under the best
//! label correspondence, and the normalized cut value.

use crate::graph::{cut_weight, GraphError, Partition, WeightedGraph};
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("partitions cover different node counts ({out} vs {truth})")]
    SizeMismatch { out: usize, truth: usize },
    #[error("graph has {graph} nodes but partitions cover {partition}")]
    GraphMismatch { graph: usize, partition: usize },
    #[error("ground truth must be fully assigned")]
    TruthNotFullyAssigned,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Misclassification report under the agreement-maximizing part matching.
#[derive(Debug, Clone)]
pub struct ErrReport {
    /// Fraction of nodes not agreeing with the matched truth part.
    pub err: f64,
    /// `matching[i]` = truth part assigned to output part i.
    pub matching: Vec<Option<usize>>,
    /// Volume of disagreeing nodes under the same matching, when a graph
    /// was supplied.
    pub misclassified_volume: Option<f64>,
}

/// Exhaustive search over column permutations; only viable for small k.
/// Returns (best agreement, per-row matched column).
fn best_match_permutation(counts: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let k = counts.len();
    let mut cols: Vec<usize> = (0..k).collect();
    let mut best_total = f64::NEG_INFINITY;
    let mut best: Vec<usize> = cols.clone();
    // Heap's algorithm.
    let mut stack = vec![0usize; k];
    let eval = |cols: &[usize], best_total: &mut f64, best: &mut Vec<usize>| {
        let total: f64 = cols.iter().enumerate().map(|(r, &c)| counts[r][c]).sum();
        if total > *best_total {
            *best_total = total;
            best.copy_from_slice(cols);
        }
    };
    eval(&cols, &mut best_total, &mut best);
    let mut i = 1;
    while i < k {
        if stack[i] < i {
            if i % 2 == 0 {
                cols.swap(0, i);
            } else {
                cols.swap(stack[i], i);
            }
            eval(&cols, &mut best_total, &mut best);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    (best_total, best)
}

/// O(k^3) Hungarian assignment maximizing the matched agreement.
/// Returns (best agreement, per-row matched column).
fn best_match_hungarian(counts: &[Vec<f64>]) -> (f64, Vec<usize>) {
    // Minimize negated agreement; classic potentials formulation with a
    // virtual 0 column, 1-indexed.
    let k = counts.len();
    let mut u = vec![0.0f64; k + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut matched_row = vec![0usize; k + 1]; // row matched to column j, 0 = free
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        matched_row[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=k {
                if !used[j] {
                    let cur = -counts[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }
    let mut assign = vec![0usize; k];
    for j in 1..=k {
        if matched_row[j] != 0 {
            assign[matched_row[j] - 1] = j - 1;
        }
    }
    let total: f64 = assign.iter().enumerate().map(|(r, &c)| counts[r][c]).sum();
    (total, assign)
}

fn contingency(output: &Partition, truth: &Partition, k: usize) -> Vec<Vec<f64>> {
    let mut counts = vec![vec![0.0f64; k]; k];
    for v in 0..output.len() {
        if let (Some(a), Some(s)) = (output.part_of(v), truth.part_of(v)) {
            counts[a][s] += 1.0;
        }
    }
    counts
}

/// err(A_1..A_k) = misclassified fraction under the best output↔truth part
/// correspondence: exhaustive permutations for k ≤ 8, maximum-weight
/// bipartite matching above. Unassigned output nodes always count as
/// misclassified. Pass the graph to also get the volume-weighted error
/// under the same matching.
pub fn misclassification_ratio(
    output: &Partition,
    truth: &Partition,
    g: Option<&WeightedGraph>,
) -> Result<ErrReport, MetricsError> {
    if output.len() != truth.len() {
        return Err(MetricsError::SizeMismatch {
            out: output.len(),
            truth: truth.len(),
        });
    }
    if !truth.is_fully_assigned() {
        return Err(MetricsError::TruthNotFullyAssigned);
    }
    if let Some(g) = g {
        if g.node_count() != output.len() {
            return Err(MetricsError::GraphMismatch {
                graph: g.node_count(),
                partition: output.len(),
            });
        }
    }
    let n = output.len();
    let k = output.k().max(truth.k()).max(1);
    let counts = contingency(output, truth, k);
    let (agreement, assign) = if k <= 8 {
        best_match_permutation(&counts)
    } else {
        best_match_hungarian(&counts)
    };
    let err = (n as f64 - agreement) / n as f64;
    let matching = (0..output.k())
        .map(|i| {
            let j = assign[i];
            (j < truth.k()).then_some(j)
        })
        .collect();
    let misclassified_volume = g.map(|g| {
        let mut bad = 0.0;
        for v in 0..n {
            let agrees = match (output.part_of(v), truth.part_of(v)) {
                (Some(a), Some(s)) => assign[a] == s,
                _ => false,
            };
            if !agrees {
                bad += g.degree(v);
            }
        }
        bad
    });
    Ok(ErrReport {
        err,
        matching,
        misclassified_volume,
    })
}

/// ncut(A_1..A_k) = Σ_i w(A_i, V∖A_i) / vol(A_i).
pub fn ncut(g: &WeightedGraph, p: &Partition) -> Result<f64, MetricsError> {
    if p.len() != g.node_count() {
        return Err(MetricsError::GraphMismatch {
            graph: g.node_count(),
            partition: p.len(),
        });
    }
    if !p.is_fully_assigned() {
        return Err(MetricsError::TruthNotFullyAssigned);
    }
    let mut total = 0.0;
    for part in 0..p.k() {
        let mask = p.part_mask(part);
        let vol = g.set_volume(&mask);
        if vol <= 0.0 {
            return Err(MetricsError::Graph(GraphError::ZeroVolume));
        }
        total += cut_weight(g, &mask) / vol;
    }
    Ok(total)
}
