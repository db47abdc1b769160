//! Benchmark harness: spectral clustering on the original similarity graph
//! versus on its sparsifier, over a dataset × size × τ grid. Cells run in
//! parallel; every cell fans out its own seed stream from the master seed,
//! so rows are reproducible in isolation. Reported numbers are medians over
//! the per-cell runs; every individual run is also recorded.

use rayon::prelude::*;
use sparsecluster_core::data::{
    build_similarity_graph, gen_gaussians, gen_twomoons, PointCloud, SimilarityConfig,
};
use sparsecluster_core::metrics::misclassification_ratio;
use sparsecluster_core::rng::mix;
use sparsecluster_core::sparsify::{sparsify, SparsifyConfig};
use sparsecluster_core::spectral::spectral_cluster;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Twomoons,
    Gaussians,
}

impl DatasetKind {
    fn id(self) -> u64 {
        match self {
            DatasetKind::Twomoons => 1,
            DatasetKind::Gaussians => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Twomoons => "twomoons",
            DatasetKind::Gaussians => "gaussians",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "twomoons" => Some(DatasetKind::Twomoons),
            "gaussians" => Some(DatasetKind::Gaussians),
            _ => None,
        }
    }

    pub fn cluster_count(self) -> usize {
        match self {
            DatasetKind::Twomoons => 2,
            DatasetKind::Gaussians => 3,
        }
    }

    pub fn kernel_sigma(self) -> f64 {
        match self {
            DatasetKind::Twomoons => 0.1,
            DatasetKind::Gaussians => 1.0,
        }
    }

    pub fn default_tau(self) -> f64 {
        match self {
            DatasetKind::Twomoons => 0.8,
            DatasetKind::Gaussians => 1.6,
        }
    }

    fn generate(self, n: usize, seed: u64) -> Result<PointCloud, String> {
        let pc = match self {
            DatasetKind::Twomoons => gen_twomoons(n, 0.05, seed),
            DatasetKind::Gaussians => gen_gaussians(n, 0.04, seed),
        };
        pc.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub datasets: Vec<DatasetKind>,
    pub sizes: Vec<usize>,
    /// τ values to test; None uses each dataset's default (0.8 / 1.6).
    pub taus: Option<Vec<f64>>,
    /// Runs per cell; the row reports medians.
    pub runs: usize,
    pub master_seed: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            datasets: vec![DatasetKind::Twomoons, DatasetKind::Gaussians],
            sizes: vec![500, 1000],
            taus: None,
            runs: 5,
            master_seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub dataset: String,
    pub n: usize,
    pub tau: f64,
    pub edge_fraction_percent: f64,
    pub err1_percent: f64,
    pub err2_percent: f64,
    pub words_exchanged: u64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub dataset: String,
    pub n: usize,
    pub tau: f64,
    pub run_seed: u64,
    pub edge_fraction_percent: f64,
    pub err1_percent: f64,
    pub err2_percent: f64,
    pub words_exchanged: u64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone)]
pub struct CellFailure {
    pub dataset: String,
    pub n: usize,
    pub tau: f64,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub runs: Vec<BenchRun>,
    pub failures: Vec<CellFailure>,
}

fn median_f64(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn median_u64(values: &mut [u64]) -> u64 {
    values.sort_unstable();
    values[values.len() / 2]
}

fn run_cell(
    dataset: DatasetKind,
    n: usize,
    tau: f64,
    runs: usize,
    master_seed: u64,
) -> Result<(BenchRow, Vec<BenchRun>), String> {
    let k = dataset.cluster_count();
    let sigma = dataset.kernel_sigma();
    let mut records = Vec::with_capacity(runs);
    for r in 0..runs {
        let run_seed = mix(
            master_seed,
            &[dataset.id(), n as u64, tau.to_bits(), r as u64],
        );
        let started = Instant::now();
        let pc = dataset.generate(n, run_seed)?;
        let truth = pc.truth().expect("generators attach ground truth").clone();
        let g = build_similarity_graph(&pc, &SimilarityConfig::new(sigma))
            .map_err(|e| e.to_string())?;
        let p1 = spectral_cluster(&g, k, run_seed).map_err(|e| e.to_string())?;
        let err1 = misclassification_ratio(&p1, &truth, None)
            .map_err(|e| e.to_string())?
            .err;
        let out = sparsify(&g, &SparsifyConfig::new(tau, run_seed)).map_err(|e| e.to_string())?;
        let p2 = spectral_cluster(&out.h, k, run_seed).map_err(|e| e.to_string())?;
        let err2 = misclassification_ratio(&p2, &truth, None)
            .map_err(|e| e.to_string())?
            .err;
        records.push(BenchRun {
            dataset: dataset.name().into(),
            n,
            tau,
            run_seed,
            edge_fraction_percent: 100.0 * out.kept_edges as f64 / g.edge_count() as f64,
            err1_percent: 100.0 * err1,
            err2_percent: 100.0 * err2,
            words_exchanged: out.words_exchanged,
            runtime_ms: started.elapsed().as_millis() as u64,
        });
    }
    let row = BenchRow {
        dataset: dataset.name().into(),
        n,
        tau,
        edge_fraction_percent: median_f64(
            &mut records
                .iter()
                .map(|r| r.edge_fraction_percent)
                .collect::<Vec<_>>(),
        ),
        err1_percent: median_f64(&mut records.iter().map(|r| r.err1_percent).collect::<Vec<_>>()),
        err2_percent: median_f64(&mut records.iter().map(|r| r.err2_percent).collect::<Vec<_>>()),
        words_exchanged: median_u64(
            &mut records.iter().map(|r| r.words_exchanged).collect::<Vec<_>>(),
        ),
        runtime_ms: median_u64(&mut records.iter().map(|r| r.runtime_ms).collect::<Vec<_>>()),
    };
    Ok((row, records))
}

pub fn run_benchmark(spec: &BenchSpec) -> BenchReport {
    let mut cells = Vec::new();
    for &dataset in &spec.datasets {
        for &n in &spec.sizes {
            let taus = spec
                .taus
                .clone()
                .unwrap_or_else(|| vec![dataset.default_tau()]);
            for tau in taus {
                cells.push((dataset, n, tau));
            }
        }
    }
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(dataset, n, tau)| {
            (
                dataset,
                n,
                tau,
                run_cell(dataset, n, tau, spec.runs.max(1), spec.master_seed),
            )
        })
        .collect();

    let mut report = BenchReport::default();
    for (dataset, n, tau, result) in results {
        match result {
            Ok((row, runs)) => {
                report.rows.push(row);
                report.runs.extend(runs);
            }
            Err(message) => report.failures.push(CellFailure {
                dataset: dataset.name().into(),
                n,
                tau,
                message,
            }),
        }
    }
    report
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "dataset,n,tau,edge_fraction_percent,err1_percent,err2_percent,words_exchanged,runtime_ms\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{:.4},{:.4},{},{}",
            r.dataset,
            r.n,
            r.tau,
            r.edge_fraction_percent,
            r.err1_percent,
            r.err2_percent,
            r.words_exchanged,
            r.runtime_ms
        );
    }
    out
}

pub fn runs_to_csv(runs: &[BenchRun]) -> String {
    let mut out = String::from(
        "dataset,n,tau,run_seed,edge_fraction_percent,err1_percent,err2_percent,words_exchanged,runtime_ms\n",
    );
    for r in runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4},{:.4},{:.4},{},{}",
            r.dataset,
            r.n,
            r.tau,
            r.run_seed,
            r.edge_fraction_percent,
            r.err1_percent,
            r.err2_percent,
            r.words_exchanged,
            r.runtime_ms
        );
    }
    out
}

pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot bench.csv produced by `sparsecluster bench`."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "bench.csv"
rows = list(csv.DictReader(open(path)))
by_dataset = defaultdict(list)
for row in rows:
    by_dataset[row["dataset"]].append(row)

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
for dataset, data in sorted(by_dataset.items()):
    data.sort(key=lambda r: int(r["n"]))
    ns = [int(r["n"]) for r in data]
    axes[0].plot(ns, [float(r["err1_percent"]) for r in data], "o-", label=f"{dataset} err1")
    axes[0].plot(ns, [float(r["err2_percent"]) for r in data], "s--", label=f"{dataset} err2")
    axes[1].plot(ns, [float(r["edge_fraction_percent"]) for r in data], "o-", label=dataset)

axes[0].set_xlabel("n")
axes[0].set_ylabel("error (%)")
axes[0].set_title("clustering error: original vs sparsified")
axes[0].legend()
axes[1].set_xlabel("n")
axes[1].set_ylabel("edges kept (%)")
axes[1].set_title("sparsifier edge fraction")
axes[1].legend()
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(f"wrote {out}")
"#;

pub fn write_report(dir: &Path, report: &BenchReport) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("bench.csv"), rows_to_csv(&report.rows))?;
    std::fs::write(dir.join("bench_runs.csv"), runs_to_csv(&report.runs))?;
    std::fs::write(dir.join("bench_plot.py"), PLOT_SCRIPT)?;
    Ok(())
}
