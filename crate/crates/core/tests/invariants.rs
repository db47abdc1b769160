//! Property tests for the structural invariants shared across modules.

use proptest::prelude::*;
use sparsecluster_core::graph::{
    conductance, cut_weight, partition_max_conductance, Partition, WeightedGraph,
};
use sparsecluster_core::rng::Rng;
use sparsecluster_core::sparsify::{
    sample_probability, sparsify, union_probability, SparsifyConfig,
};
use sparsecluster_core::spectral::bottom_eigenpairs;

/// Build a valid graph from arbitrary pair data: ids reduced mod n,
/// self-loops and duplicates skipped.
fn graph_from_raw(n: usize, raw: &[(usize, usize, f64)]) -> WeightedGraph {
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for &(a, b, w) in raw {
        let (u, v) = (a % n, b % n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push((key.0, key.1, w));
        }
    }
    // Ring backbone keeps every node non-isolated.
    for i in 0..n {
        let key = (i.min((i + 1) % n), i.max((i + 1) % n));
        if seen.insert(key) {
            edges.push((key.0, key.1, 1.0));
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (3usize..24, prop::collection::vec((0usize..24, 0usize..24, 0.01f64..5.0), 0..120))
        .prop_map(|(n, raw)| graph_from_raw(n, &raw))
}

proptest! {
    #[test]
    fn cut_is_symmetric_under_complement(g in arb_graph(), seed in 0u64..1000) {
        let n = g.node_count();
        let mut rng = Rng::new(seed);
        for _ in 0..100 {
            let mask: Vec<bool> = (0..n).map(|_| rng.bernoulli(0.5)).collect();
            let complement: Vec<bool> = mask.iter().map(|&b| !b).collect();
            let a = cut_weight(&g, &mask);
            let b = cut_weight(&g, &complement);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn degree_sum_is_twice_edge_weight(g in arb_graph()) {
        let total_w: f64 = g.edges().iter().map(|e| e.w).sum();
        let vol = g.total_volume();
        prop_assert!((vol - 2.0 * total_w).abs() <= 1e-12 * vol.max(1.0));
        for u in 0..g.node_count() {
            let from_adj: f64 = g.neighbors(u).iter().map(|&(_, w)| w).sum();
            prop_assert!((g.degree(u) - from_adj).abs() <= 1e-12 * g.degree(u).max(1.0));
        }
    }

    #[test]
    fn conductance_in_unit_range_for_small_sets(g in arb_graph(), seed in 0u64..1000) {
        let n = g.node_count();
        let half = g.total_volume() / 2.0;
        let mut rng = Rng::new(seed);
        for _ in 0..60 {
            let mask: Vec<bool> = (0..n).map(|_| rng.bernoulli(0.4)).collect();
            let vol = g.set_volume(&mask);
            if vol > 0.0 && vol <= half {
                let phi = conductance(&g, &mask).unwrap();
                prop_assert!((0.0..=1.0 + 1e-12).contains(&phi), "phi = {phi}");
            }
        }
    }

    #[test]
    fn max_conductance_invariant_under_part_relabeling(
        g in arb_graph(),
        labels in prop::collection::vec(0usize..4, 24),
        )
    {
        let n = g.node_count();
        // Make sure every part id below k actually occurs.
        let mut labels: Vec<usize> = labels[..n].to_vec();
        labels[0] = 0;
        let k = labels.iter().max().unwrap() + 1;
        let p = Partition::from_labels(k, labels.iter().copied()).unwrap();
        let relabel: Vec<usize> = (0..k).map(|i| k - 1 - i).collect();
        let q = Partition::from_labels(k, labels.iter().map(|&l| relabel[l])).unwrap();
        let a = partition_max_conductance(&g, &p);
        let b = partition_max_conductance(&g, &q);
        match (a, b) {
            (Ok(x), Ok(y)) => prop_assert!((x - y).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "mismatch: {other:?}"),
        }
    }

    #[test]
    fn union_probability_bounds_hold(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let pe = union_probability(p, q).unwrap();
        prop_assert!(pe >= p.max(q) - 1e-15);
        prop_assert!(pe <= (p + q).min(1.0) + 1e-15);
        prop_assert!(pe >= 0.5 * (p + q) - 1e-15);
    }

    #[test]
    fn sparsifier_output_is_reweighted_subgraph(g in arb_graph(), seed in 0u64..500, tau in 0.2f64..4.0) {
        let cfg = SparsifyConfig::new(tau, seed);
        let out = sparsify(&g, &cfg).unwrap();
        prop_assert_eq!(out.words_exchanged, out.kept_edges as u64);
        prop_assert_eq!(out.h.node_count(), g.node_count());
        for e in out.h.edges() {
            let w = g.edge_weight(e.u, e.v);
            prop_assert!(w.is_some(), "edge ({}, {}) not in g", e.u, e.v);
            let p_e = union_probability(
                sample_probability(&g, e.u, e.v, &cfg).unwrap(),
                sample_probability(&g, e.v, e.u, &cfg).unwrap(),
            ).unwrap();
            prop_assert!((e.w - w.unwrap() / p_e).abs() <= 1e-12 * e.w.max(1.0));
        }
    }

    #[test]
    fn eigenvalues_within_laplacian_range(g in arb_graph()) {
        let j = 4.min(g.node_count());
        let s = bottom_eigenpairs(&g, j, 1e-8).unwrap();
        for &l in &s.eigenvalues {
            prop_assert!(l >= -1e-8, "lambda {l}");
            prop_assert!(l <= 2.0 + 1e-8, "lambda {l}");
        }
        for w in s.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-10);
        }
    }
}
