//! Cluster-preserving graph sparsification and distributed diffusion
//! clustering.
//!
//! Two algorithms sit at the center of this crate:
//!
//! * [`sparsify`](sparsify::sparsify) samples each edge from both endpoints
//!   with degree-local probabilities min{w·τ·log₂n/d, 1} and reweights
//!   survivors by the union probability, producing a sparse subgraph that
//!   keeps the cluster structure of the input (not its full spectrum).
//! * [`run_protocol`](distsim::run_protocol) simulates the round-synchronous
//!   clustering protocol: degree-proportional seeding, T synchronous
//!   averaging rounds under the lazy-walk matrix P = I − 𝓛/2, and a
//!   threshold query that labels every node, with exact message-word
//!   accounting.
//!
//! Everything else supports those two: graph/conductance primitives
//! ([`graph`]), a matrix-free normalized-Laplacian eigensolver with a dense
//! oracle path ([`spectral`], [`dense`]), the spectral-clustering baseline
//! ([`spectral`], [`kmeans`]), synthetic datasets and similarity graphs
//! ([`data`], [`synth`]), and clustering-quality metrics ([`metrics`]).
//!
//! The crate is `no_std` (alloc required); all randomness flows through the
//! seeded, stream-splitting generator in [`rng`], so every operation is
//! deterministic given its seed.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod data;
pub mod dense;
pub mod distsim;
pub mod graph;
pub mod kmeans;
pub mod metrics;
pub mod rng;
pub mod sparsify;
pub mod spectral;
pub mod synth;
