//! End-to-end runs of the `sparsecluster` binary against temp directories.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sparsecluster")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "sparsecluster-cli-{tag}-{}",
        std::process::id()
    ));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary should run")
}

fn expect_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn gen_sparsify_spectral_metrics_pipeline() {
    let dir = temp_dir("pipeline");
    let d = dir.as_path();

    let out = run(&[
        "gen",
        "--dataset",
        "twomoons",
        "--n",
        "300",
        "--points",
        &path(d, "pts.csv"),
        "--truth",
        &path(d, "truth.labels"),
        "--graph",
        &path(d, "g.edges"),
        "--seed",
        "7",
    ]);
    expect_ok(&out);
    assert!(d.join("pts.csv").exists());
    assert!(d.join("truth.labels").exists());
    let graph_text = fs::read_to_string(d.join("g.edges")).unwrap();
    let header = graph_text.lines().next().unwrap();
    assert!(header.starts_with("300 "));

    let out = run(&[
        "sparsify",
        "--input",
        &path(d, "g.edges"),
        "--tau",
        "0.8",
        "--seed",
        "7",
        "--output",
        &path(d, "h.edges"),
        "--stats",
        &path(d, "stats.json"),
    ]);
    expect_ok(&out);
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["n"], 300);
    assert_eq!(stats["tau"], 0.8);
    assert_eq!(stats["seed"], 7);
    assert_eq!(stats["kept_edges"], stats["words_exchanged"]);
    assert!(stats["sum_edge_probability"].as_f64().unwrap() > 0.0);
    assert!(stats["m"].as_u64().unwrap() > stats["kept_edges"].as_u64().unwrap());

    let out = run(&[
        "spectral",
        "--input",
        &path(d, "h.edges"),
        "--k",
        "2",
        "--labels",
        &path(d, "pred.labels"),
        "--spectrum",
        &path(d, "spectrum.csv"),
        "--embedding",
        &path(d, "emb.csv"),
        "--truth",
        &path(d, "truth.labels"),
        "--seed",
        "7",
    ]);
    let stdout = expect_ok(&out);
    assert!(stdout.contains("err="), "stdout: {stdout}");
    let spectrum_text = fs::read_to_string(d.join("spectrum.csv")).unwrap();
    assert!(spectrum_text.starts_with("index,eigenvalue,residual"));
    assert_eq!(fs::read_to_string(d.join("emb.csv")).unwrap().lines().count(), 300);

    let out = run(&[
        "metrics",
        "--pred",
        &path(d, "pred.labels"),
        "--truth",
        &path(d, "truth.labels"),
        "--graph",
        &path(d, "g.edges"),
    ]);
    let stdout = expect_ok(&out);
    let err_line = stdout
        .lines()
        .find(|l| l.starts_with("err:"))
        .expect("err line");
    let err: f64 = err_line.trim_start_matches("err:").trim().parse().unwrap();
    assert!(err <= 0.05, "pipeline err {err}");
    assert!(stdout.contains("ncut:"));

    let _ = fs::remove_dir_all(dir);
}

#[test]
fn cluster_command_writes_labels_and_transcript() {
    let dir = temp_dir("cluster");
    let d = dir.as_path();
    // Two cliques of 40 joined by one bridge, written by hand.
    let mut text = String::new();
    let side = 40;
    let mut edges = Vec::new();
    for base in [0, side] {
        for i in 0..side {
            for j in (i + 1)..side {
                edges.push((base + i, base + j));
            }
        }
    }
    edges.push((0, side));
    text.push_str(&format!("{} {}\n", 2 * side, edges.len()));
    let mut truth = String::from("node,label\n");
    for (u, v) in &edges {
        text.push_str(&format!("{u} {v} 1\n"));
    }
    for v in 0..2 * side {
        truth.push_str(&format!("{v},{}\n", usize::from(v >= side)));
    }
    fs::write(d.join("g.edges"), text).unwrap();
    fs::write(d.join("truth.labels"), truth).unwrap();

    let out = run(&[
        "cluster",
        "--input",
        &path(d, "g.edges"),
        "--beta",
        "0.4",
        "--rounds",
        "8",
        "--seed",
        "3",
        "--seed-multiplier",
        "5",
        "--truth",
        &path(d, "truth.labels"),
        "--out",
        &path(d, "out.labels"),
        "--transcript",
        &path(d, "t.json"),
    ]);
    let stdout = expect_ok(&out);
    assert!(stdout.contains("T=8"), "stdout: {stdout}");

    let t: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("t.json")).unwrap()).unwrap();
    assert_eq!(t["rounds"], 8);
    let s = t["seed_count"].as_u64().unwrap();
    let m = edges.len() as u64;
    assert_eq!(t["total_words"].as_u64().unwrap(), 8 * 2 * m * s);
    assert_eq!(
        t["words_per_round"].as_array().unwrap().len(),
        8usize
    );
    assert!(t["max_conservation_drift"].as_f64().unwrap() < 1e-10);
    let labels_text = fs::read_to_string(d.join("out.labels")).unwrap();
    assert_eq!(labels_text.lines().count(), 2 * side + 1); // header + nodes

    let _ = fs::remove_dir_all(dir);
}

#[test]
fn bench_writes_csv_and_plot_script() {
    let dir = temp_dir("bench");
    let d = dir.as_path();
    let out = run(&[
        "bench",
        "--datasets",
        "gaussians",
        "--sizes",
        "200",
        "--runs",
        "2",
        "--output-dir",
        &d.to_string_lossy(),
        "--seed",
        "11",
    ]);
    expect_ok(&out);
    let csv = fs::read_to_string(d.join("bench.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,n,tau,edge_fraction_percent,err1_percent,err2_percent,words_exchanged,runtime_ms"
    );
    let row = lines.next().expect("one data row");
    assert!(row.starts_with("gaussians,200,1.6,"), "row: {row}");
    assert!(d.join("bench_runs.csv").exists());
    assert!(d.join("bench_plot.py").exists());

    let _ = fs::remove_dir_all(dir);
}

#[test]
fn bench_records_cell_failures_and_exits_nonzero() {
    let dir = temp_dir("benchfail");
    let d = dir.as_path();
    // tau=0 cells fail (invalid tau); tau=1.6 cells succeed. The harness
    // must keep going, write the good rows, and exit nonzero.
    let out = run(&[
        "bench",
        "--datasets",
        "gaussians",
        "--sizes",
        "150",
        "--taus",
        "0,1.6",
        "--runs",
        "1",
        "--output-dir",
        &d.to_string_lossy(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("tau=0"), "stderr: {stderr}");
    let csv = fs::read_to_string(d.join("bench.csv")).unwrap();
    assert!(
        csv.lines().any(|l| l.starts_with("gaussians,150,1.6,")),
        "good cell missing from csv: {csv}"
    );
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn errors_surface_with_nonzero_exit() {
    let dir = temp_dir("errors");
    let d = dir.as_path();
    fs::write(d.join("bad.edges"), "2 1\n1 1 1.0\n").unwrap();
    let out = run(&[
        "sparsify",
        "--input",
        &path(d, "bad.edges"),
        "--tau",
        "1.0",
        "--output",
        &path(d, "h.edges"),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");

    // tau auto without --k.
    fs::write(d.join("ok.edges"), "2 1\n0 1 1.0\n").unwrap();
    let out = run(&[
        "sparsify",
        "--input",
        &path(d, "ok.edges"),
        "--tau",
        "auto",
        "--output",
        &path(d, "h.edges"),
    ]);
    assert!(!out.status.success());

    let _ = fs::remove_dir_all(dir);
}
