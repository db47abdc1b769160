use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sparsecluster::bench::{run_benchmark, write_report, BenchSpec, DatasetKind};
use sparsecluster::formats;
use sparsecluster_core::data::{
    build_similarity_graph, gen_gaussians, gen_twomoons, SimilarityConfig,
};
use sparsecluster_core::distsim::{run_protocol, Rounds, SimConfig};
use sparsecluster_core::metrics::{misclassification_ratio, ncut};
use sparsecluster_core::sparsify::{sparsify, tau_doubling_search, SparsifyConfig};
use sparsecluster_core::spectral::{
    bottom_eigenpairs, spectral_cluster, spectral_embedding, EigOptions,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "sparsecluster",
    about = "Cluster-preserving graph sparsification and distributed diffusion clustering",
    version
)]
struct Cli {
    /// Master RNG seed.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (points + ground-truth labels).
    Gen(GenArgs),
    /// Sample a cluster-preserving sparsifier from a graph.
    Sparsify(SparsifyArgs),
    /// Run the distributed seeding/averaging/query protocol.
    Cluster(ClusterArgs),
    /// Spectral clustering baseline and spectrum/embedding export.
    Spectral(SpectralArgs),
    /// Original-vs-sparsified benchmark grid; writes bench.csv and a plot script.
    Bench(BenchArgs),
    /// Compare a predicted labeling against ground truth.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Dataset: twomoons or gaussians.
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    n: usize,
    /// Positional noise (twomoons).
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Component variance (gaussians).
    #[arg(long, default_value_t = 0.04)]
    variance: f64,
    /// Where to write the points CSV.
    #[arg(long)]
    points: PathBuf,
    /// Where to write the ground-truth labels.
    #[arg(long)]
    truth: PathBuf,
    /// Also build the similarity graph and write it here.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Kernel bandwidth for --graph (default: 0.1 twomoons, 1.0 gaussians).
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct SparsifyArgs {
    /// Input graph (edge-list format).
    #[arg(long)]
    input: PathBuf,
    /// τ value, or `auto` for the doubling search (requires --k).
    #[arg(long)]
    tau: String,
    /// Cluster count for --tau auto.
    #[arg(long)]
    k: Option<usize>,
    /// Where to write the sparsified graph.
    #[arg(long)]
    output: PathBuf,
    /// Where to write the stats JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Cluster balance lower bound β.
    #[arg(long)]
    beta: f64,
    /// `auto` or an explicit round count.
    #[arg(long, default_value = "auto")]
    rounds: String,
    /// Cluster-count hint; lets auto rounds use log n / λ_{k+1}.
    #[arg(long)]
    k_hint: Option<usize>,
    /// Multiplier a in s̄ = ⌈(a/β)·ln(1/β)⌉.
    #[arg(long, default_value_t = 1.0)]
    seed_multiplier: f64,
    /// Multiplier c in T = ⌈c·log n / λ̂⌉.
    #[arg(long, default_value_t = 1.0)]
    round_multiplier: f64,
    /// Ground-truth labels; adds misclassified volume to the transcript.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Where to write the labels CSV.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the transcript JSON.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    /// Where to write cluster labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Where to write the `index,eigenvalue,residual` CSV.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Where to write the row-normalized embedding CSV.
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Eigenpairs to export (default k+1).
    #[arg(long)]
    eigs: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Ground truth; prints the misclassification ratio when given.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated datasets (twomoons,gaussians).
    #[arg(long, default_value = "twomoons,gaussians")]
    datasets: String,
    /// Comma-separated sizes.
    #[arg(long, default_value = "500,1000")]
    sizes: String,
    /// Comma-separated τ values (default: per-dataset 0.8 / 1.6).
    #[arg(long)]
    taus: Option<String>,
    /// Runs per cell; rows report medians.
    #[arg(long, default_value_t = 5)]
    runs: usize,
}

#[derive(Args)]
struct MetricsArgs {
    /// Predicted labels CSV.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth labels CSV.
    #[arg(long)]
    truth: PathBuf,
    /// Graph for the volume-weighted error and ncut.
    #[arg(long)]
    graph: Option<PathBuf>,
}

fn resolve(dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        dir.join(path)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("failed to configure the thread pool")?;
    }
    std::fs::create_dir_all(&cli.output_dir)
        .with_context(|| format!("cannot create output dir {}", cli.output_dir.display()))?;
    match &cli.command {
        Command::Gen(args) => cmd_gen(&cli, args),
        Command::Sparsify(args) => cmd_sparsify(&cli, args),
        Command::Cluster(args) => cmd_cluster(&cli, args),
        Command::Spectral(args) => cmd_spectral(&cli, args),
        Command::Bench(args) => cmd_bench(&cli, args),
        Command::Metrics(args) => cmd_metrics(&cli, args),
    }
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<()> {
    let (pc, default_sigma) = match args.dataset.as_str() {
        "twomoons" => (gen_twomoons(args.n, args.noise, cli.seed)?, 0.1),
        "gaussians" => (gen_gaussians(args.n, args.variance, cli.seed)?, 1.0),
        other => bail!("unknown dataset {other:?} (expected twomoons or gaussians)"),
    };
    formats::write_points(&resolve(&cli.output_dir, &args.points), &pc)?;
    let truth = pc.truth().expect("generators attach ground truth");
    formats::write_partition(&resolve(&cli.output_dir, &args.truth), truth)?;
    println!(
        "gen: {} n={} -> {} / {}",
        args.dataset,
        args.n,
        args.points.display(),
        args.truth.display()
    );
    if let Some(graph_path) = &args.graph {
        let sigma = args.sigma.unwrap_or(default_sigma);
        let g = build_similarity_graph(&pc, &SimilarityConfig::new(sigma))?;
        formats::write_edge_list(&resolve(&cli.output_dir, graph_path), &g)?;
        println!(
            "gen: similarity graph sigma={} m={} -> {}",
            sigma,
            g.edge_count(),
            graph_path.display()
        );
    }
    Ok(())
}

fn cmd_sparsify(cli: &Cli, args: &SparsifyArgs) -> Result<()> {
    let g = formats::read_edge_list(&resolve(&cli.output_dir, &args.input))?;
    let started = Instant::now();
    let (tau, output) = if args.tau == "auto" {
        let k = args
            .k
            .ok_or_else(|| anyhow!("--tau auto requires --k <clusters>"))?;
        let result = tau_doubling_search(&g, k, cli.seed)?;
        (result.tau, result.output)
    } else {
        let tau: f64 = args
            .tau
            .parse()
            .map_err(|_| anyhow!("--tau must be a number or `auto`"))?;
        (tau, sparsify(&g, &SparsifyConfig::new(tau, cli.seed))?)
    };
    let runtime_ms = started.elapsed().as_millis() as u64;
    formats::write_edge_list(&resolve(&cli.output_dir, &args.output), &output.h)?;
    if let Some(stats_path) = &args.stats {
        let stats = formats::SparsifyStats {
            n: g.node_count(),
            m: g.edge_count(),
            kept_edges: output.kept_edges,
            sum_edge_probability: output.sum_edge_probability,
            words_exchanged: output.words_exchanged,
            runtime_ms,
            tau,
            seed: cli.seed,
        };
        formats::write_sparsify_stats(&resolve(&cli.output_dir, stats_path), &stats)?;
    }
    println!(
        "sparsify: tau={} kept {}/{} edges ({:.2}%) in {} ms",
        tau,
        output.kept_edges,
        g.edge_count(),
        100.0 * output.kept_edges as f64 / g.edge_count().max(1) as f64,
        runtime_ms
    );
    Ok(())
}

fn cmd_cluster(cli: &Cli, args: &ClusterArgs) -> Result<()> {
    let g = formats::read_edge_list(&resolve(&cli.output_dir, &args.input))?;
    let mut cfg = SimConfig::new(args.beta, cli.seed);
    cfg.k_hint = args.k_hint;
    cfg.seed_multiplier = args.seed_multiplier;
    cfg.round_multiplier = args.round_multiplier;
    cfg.rounds = if args.rounds == "auto" {
        Rounds::Auto
    } else {
        Rounds::Fixed(
            args.rounds
                .parse()
                .map_err(|_| anyhow!("--rounds must be a count or `auto`"))?,
        )
    };
    let truth = match &args.truth {
        Some(path) => Some(formats::read_labels_as_partition(&resolve(
            &cli.output_dir,
            path,
        ))?),
        None => None,
    };
    let transcript = run_protocol(&g, &cfg, truth.as_ref())?;
    formats::write_labels(
        &resolve(&cli.output_dir, &args.out),
        transcript.labels.labels(),
    )?;
    if let Some(path) = &args.transcript {
        formats::write_transcript(&resolve(&cli.output_dir, path), &transcript)?;
    }
    println!(
        "cluster: T={} s={} words={} unlabeled={}{}",
        transcript.rounds,
        transcript.seed_count,
        transcript.total_words,
        transcript.unlabeled_count,
        match transcript.misclassified_volume {
            Some(v) => format!(
                " misclassified_volume={v:.3} ({:.2}% of vol)",
                100.0 * v / transcript.volume
            ),
            None => String::new(),
        }
    );
    Ok(())
}

fn cmd_spectral(cli: &Cli, args: &SpectralArgs) -> Result<()> {
    let g = formats::read_edge_list(&resolve(&cli.output_dir, &args.input))?;
    let opts = EigOptions {
        tol: args.tol,
        ..EigOptions::default()
    };
    if let Some(path) = &args.spectrum {
        let j = args.eigs.unwrap_or(args.k + 1).min(g.node_count());
        let spectrum = bottom_eigenpairs(&g, j, args.tol)?;
        std::fs::write(
            resolve(&cli.output_dir, path),
            formats::serialize_spectrum(&spectrum),
        )?;
        let lambdas: Vec<String> = spectrum
            .eigenvalues
            .iter()
            .map(|l| format!("{l:.6}"))
            .collect();
        println!("spectral: eigenvalues [{}]", lambdas.join(", "));
    }
    if let Some(path) = &args.embedding {
        let rows = spectral_embedding(&g, args.k, &opts)?;
        std::fs::write(
            resolve(&cli.output_dir, path),
            formats::serialize_embedding(&rows),
        )?;
    }
    if let Some(path) = &args.labels {
        let p = spectral_cluster(&g, args.k, cli.seed)?;
        formats::write_partition(&resolve(&cli.output_dir, path), &p)?;
        if let Some(truth_path) = &args.truth {
            let truth =
                formats::read_labels_as_partition(&resolve(&cli.output_dir, truth_path))?;
            let report = misclassification_ratio(&p, &truth, Some(&g))?;
            println!(
                "spectral: err={:.4} misclassified_volume={:.3}",
                report.err,
                report.misclassified_volume.unwrap_or(0.0)
            );
        }
        let nc = ncut(&g, &p)?;
        println!("spectral: k={} ncut={:.6}", args.k, nc);
    }
    Ok(())
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<()> {
    let datasets: Vec<DatasetKind> = args
        .datasets
        .split(',')
        .map(|s| DatasetKind::parse(s.trim()).ok_or_else(|| anyhow!("unknown dataset {s:?}")))
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|s| s.trim().parse().context("bad size"))
        .collect::<Result<_>>()?;
    let taus = match &args.taus {
        Some(t) => Some(
            t.split(',')
                .map(|s| s.trim().parse::<f64>().context("bad tau"))
                .collect::<Result<Vec<f64>>>()?,
        ),
        None => None,
    };
    let spec = BenchSpec {
        datasets,
        sizes,
        taus,
        runs: args.runs,
        master_seed: cli.seed,
    };
    let report = run_benchmark(&spec);
    write_report(&cli.output_dir, &report)?;
    for row in &report.rows {
        println!(
            "bench: {} n={} tau={} edges={:.2}% err1={:.3}% err2={:.3}%",
            row.dataset, row.n, row.tau, row.edge_fraction_percent, row.err1_percent,
            row.err2_percent
        );
    }
    if !report.failures.is_empty() {
        for f in &report.failures {
            eprintln!(
                "bench: cell {} n={} tau={} failed: {}",
                f.dataset, f.n, f.tau, f.message
            );
        }
        bail!("{} benchmark cell(s) failed", report.failures.len());
    }
    println!("bench: wrote bench.csv, bench_runs.csv, bench_plot.py");
    Ok(())
}

fn cmd_metrics(cli: &Cli, args: &MetricsArgs) -> Result<()> {
    let pred = formats::read_labels_as_partition(&resolve(&cli.output_dir, &args.pred))?;
    let truth = formats::read_labels_as_partition(&resolve(&cli.output_dir, &args.truth))?;
    let g = match &args.graph {
        Some(path) => Some(formats::read_edge_list(&resolve(&cli.output_dir, path))?),
        None => None,
    };
    let report = misclassification_ratio(&pred, &truth, g.as_ref())?;
    println!("err: {:.6}", report.err);
    if let Some(vol) = report.misclassified_volume {
        println!("misclassified_volume: {vol:.6}");
    }
    if let Some(g) = &g {
        if pred.is_fully_assigned() {
            println!("ncut: {:.6}", ncut(g, &pred)?);
        }
    }
    Ok(())
}
