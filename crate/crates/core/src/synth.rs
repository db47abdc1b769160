//! Synthetic benchmark graphs with planted cluster structure.

use crate::graph::{Partition, WeightedGraph};
use crate::rng::Rng;
use alloc::vec::Vec;

fn push_clique(edges: &mut Vec<(usize, usize, f64)>, base: usize, size: usize, w: f64) {
    for i in 0..size {
        for j in (i + 1)..size {
            edges.push((base + i, base + j, w));
        }
    }
}

/// k disjoint unit-weight cliques of equal size.
pub fn disjoint_cliques(k: usize, size: usize) -> (WeightedGraph, Partition) {
    let mut edges = Vec::new();
    let mut labels = Vec::with_capacity(k * size);
    for c in 0..k {
        push_clique(&mut edges, c * size, size, 1.0);
        labels.extend(core::iter::repeat(c).take(size));
    }
    let g = WeightedGraph::from_edges(k * size, edges).expect("clique edges are valid");
    let p = Partition::from_labels(k, labels).expect("labels in range");
    (g, p)
}

/// Two unit-weight cliques of `side` nodes joined by `bridges` edges
/// (bridge i connects node i to node side+i).
pub fn two_cliques_bridged(side: usize, bridges: usize) -> (WeightedGraph, Partition) {
    assert!(bridges <= side);
    let mut edges = Vec::new();
    push_clique(&mut edges, 0, side, 1.0);
    push_clique(&mut edges, side, side, 1.0);
    for i in 0..bridges {
        edges.push((i, side + i, 1.0));
    }
    let g = WeightedGraph::from_edges(2 * side, edges).expect("edges are valid");
    let p = Partition::from_labels(2, (0..2 * side).map(|v| usize::from(v >= side)))
        .expect("labels in range");
    (g, p)
}

/// k planted clusters: each cluster is a unit-weight clique, and every
/// inter-cluster pair carries an edge of weight `w_out` with probability
/// `p_out`. The ground truth is the planted assignment.
pub fn planted_clusters(
    k: usize,
    size: usize,
    p_out: f64,
    w_out: f64,
    seed: u64,
) -> (WeightedGraph, Partition) {
    let n = k * size;
    let mut edges = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for c in 0..k {
        push_clique(&mut edges, c * size, size, 1.0);
        labels.extend(core::iter::repeat(c).take(size));
    }
    let mut rng = Rng::stream(seed, &[0x706c_616e_74]);
    for u in 0..n {
        for v in (u + 1)..n {
            if labels[u] != labels[v] && rng.bernoulli(p_out) {
                edges.push((u, v, w_out));
            }
        }
    }
    let g = WeightedGraph::from_edges(n, edges).expect("edges are valid");
    let p = Partition::from_labels(k, labels).expect("labels in range");
    (g, p)
}

/// Erdos-Renyi-style weighted graph with a ring backbone so no node is
/// isolated. Weights are uniform in [0.5, 1.5].
pub fn random_connectedish(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = Rng::stream(seed, &[0x7261_6e64]);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let ring = j == i + 1 || (i == 0 && j == n - 1);
            if ring || rng.bernoulli(p) {
                edges.push((i, j, rng.uniform(0.5, 1.5)));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).expect("edges are valid")
}
