//! End-to-end checks on the synthetic datasets: generator → similarity
//! graph → spectral clustering, with and without sparsification.

use sparsecluster_core::data::{
    build_similarity_graph, gen_gaussians, gen_twomoons, SimilarityConfig,
};
use sparsecluster_core::distsim::{run_protocol, Rounds, SimConfig};
use sparsecluster_core::metrics::{misclassification_ratio, ncut};
use sparsecluster_core::sparsify::{sparsify, SparsifyConfig};
use sparsecluster_core::spectral::spectral_cluster;
use sparsecluster_core::synth;

#[test]
fn twomoons_spectral_error_within_tolerance() {
    let pc = gen_twomoons(1000, 0.05, 2).unwrap();
    let g = build_similarity_graph(&pc, &SimilarityConfig::new(0.1)).unwrap();
    let p = spectral_cluster(&g, 2, 2).unwrap();
    let err = misclassification_ratio(&p, pc.truth().unwrap(), None)
        .unwrap()
        .err;
    assert!(err <= 0.03, "twomoons err {err}");
}

#[test]
fn gaussians_spectral_error_within_tolerance() {
    let pc = gen_gaussians(1000, 0.04, 2).unwrap();
    let g = build_similarity_graph(&pc, &SimilarityConfig::new(1.0)).unwrap();
    let p = spectral_cluster(&g, 3, 2).unwrap();
    let err = misclassification_ratio(&p, pc.truth().unwrap(), None)
        .unwrap()
        .err;
    assert!(err <= 0.04, "gaussians err {err}");
}

#[test]
fn sparsified_gaussians_cluster_as_well_as_dense() {
    let pc = gen_gaussians(800, 0.04, 5).unwrap();
    let g = build_similarity_graph(&pc, &SimilarityConfig::new(1.0)).unwrap();
    let truth = pc.truth().unwrap();
    let out = sparsify(&g, &SparsifyConfig::new(1.6, 5)).unwrap();
    assert!(out.kept_edges < g.edge_count() / 10);
    let p = spectral_cluster(&out.h, 3, 5).unwrap();
    let err = misclassification_ratio(&p, truth, None).unwrap().err;
    assert!(err <= 0.05, "sparsified gaussians err {err}");
}

#[test]
fn ncut_of_recovered_clusters_is_small() {
    let (g, truth) = synth::two_cliques_bridged(60, 2);
    let p = spectral_cluster(&g, 2, 9).unwrap();
    let nc = ncut(&g, &p).unwrap();
    let nc_truth = ncut(&g, &truth).unwrap();
    assert!((nc - nc_truth).abs() < 1e-9, "ncut {nc} vs truth {nc_truth}");
}

#[test]
fn protocol_after_sparsification_still_recovers() {
    // Sparsify first, then run the distributed protocol on H.
    let (g, truth) = synth::two_cliques_bridged(150, 2);
    let out = sparsify(&g, &SparsifyConfig::new(2.0, 3)).unwrap();
    assert!(!out.h.has_isolated_nodes());
    let mut ok = 0;
    for seed in 0..5 {
        let mut cfg = SimConfig::new(0.4, seed);
        cfg.seed_multiplier = 5.0;
        cfg.rounds = Rounds::Fixed(8);
        let t = run_protocol(&out.h, &cfg, Some(&truth)).unwrap();
        if t.misclassified_volume.unwrap() <= 0.02 * out.h.total_volume() {
            ok += 1;
        }
    }
    assert!(ok >= 4, "recovered on sparsifier in only {ok}/5 seeds");
}
