//! On-disk formats: edge-list graphs, label files, point/spectrum CSVs,
//! plain PPM images, and the JSON sidecars.

use serde::{Deserialize, Serialize};
use sparsecluster_core::data::{DataError, PointCloud, RasterImage};
use sparsecluster_core::distsim::SimTranscript;
use sparsecluster_core::graph::{GraphError, Partition, WeightedGraph};
use sparsecluster_core::spectral::Spectrum;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ppm: {0}")]
    Ppm(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Parse the edge-list text format: a `n m` header line, then m lines
/// `u v w` with 0-based dense node ids. Errors carry 1-based line numbers.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph, FormatError> {
    let mut lines = text.lines().enumerate();
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected `n m` header"))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .ok_or_else(|| parse_err(header_no + 1, "missing node count"))?
        .parse()
        .map_err(|_| parse_err(header_no + 1, "node count is not an integer"))?;
    let m: usize = parts
        .next()
        .ok_or_else(|| parse_err(header_no + 1, "missing edge count"))?
        .parse()
        .map_err(|_| parse_err(header_no + 1, "edge count is not an integer"))?;
    if parts.next().is_some() {
        return Err(parse_err(header_no + 1, "trailing tokens after `n m` header"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    let mut read = 0usize;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if read == m {
            return Err(parse_err(line_no, format!("more than {m} edge lines")));
        }
        let mut tok = line.split_whitespace();
        let u: usize = tok
            .next()
            .unwrap()
            .parse()
            .map_err(|_| parse_err(line_no, "source id is not an integer"))?;
        let v: usize = tok
            .next()
            .ok_or_else(|| parse_err(line_no, "missing target id"))?
            .parse()
            .map_err(|_| parse_err(line_no, "target id is not an integer"))?;
        let w: f64 = tok
            .next()
            .ok_or_else(|| parse_err(line_no, "missing weight"))?
            .parse()
            .map_err(|_| parse_err(line_no, "weight is not a number"))?;
        if tok.next().is_some() {
            return Err(parse_err(line_no, "trailing tokens after `u v w`"));
        }
        if u == v {
            return Err(parse_err(line_no, format!("self-loop at node {u}")));
        }
        if u >= n || v >= n {
            return Err(parse_err(
                line_no,
                format!("node id out of range for n = {n}"),
            ));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(line_no, format!("bad weight {w}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(line_no, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v, w));
        read += 1;
    }
    if read != m {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {m} edges, found {read}"),
        ));
    }
    Ok(WeightedGraph::from_edges(n, edges)?)
}

/// Canonical serialization: `n m` header, then edges sorted with u < v.
/// parse(serialize(g)) reproduces g exactly.
pub fn serialize_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.node_count(), g.edge_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
    }
    out
}

pub fn read_edge_list(path: &Path) -> Result<WeightedGraph, FormatError> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(path: &Path, g: &WeightedGraph) -> Result<(), FormatError> {
    Ok(fs::write(path, serialize_edge_list(g))?)
}

/// Labels CSV: `node,label` header, one row per node, empty label for
/// unassigned nodes. Ground-truth files use the `node,part` header instead;
/// the parser accepts either.
pub fn serialize_labels(labels: &[Option<usize>]) -> String {
    serialize_labels_with_header(labels, "node,label")
}

fn serialize_labels_with_header(labels: &[Option<usize>], header: &str) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (v, l) in labels.iter().enumerate() {
        match l {
            Some(l) => {
                let _ = writeln!(out, "{v},{l}");
            }
            None => {
                let _ = writeln!(out, "{v},");
            }
        }
    }
    out
}

pub fn parse_labels(text: &str) -> Result<Vec<Option<usize>>, FormatError> {
    let mut rows: Vec<(usize, Option<usize>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| parse_err(line_no, "expected `node,label`"))?;
        let a = a.trim();
        if idx == 0 && a.parse::<usize>().is_err() {
            continue; // header row
        }
        let node: usize = a
            .parse()
            .map_err(|_| parse_err(line_no, "node id is not an integer"))?;
        let b = b.trim();
        let label = if b.is_empty() {
            None
        } else {
            Some(
                b.parse::<usize>()
                    .map_err(|_| parse_err(line_no, "label is not an integer"))?,
            )
        };
        rows.push((node, label));
    }
    let n = rows.len();
    let mut labels = vec![None; n];
    for (node, label) in rows {
        if node >= n {
            return Err(parse_err(0, format!("node id {node} not dense in [0, {n})")));
        }
        labels[node] = label;
    }
    Ok(labels)
}

pub fn read_labels_as_partition(path: &Path) -> Result<Partition, FormatError> {
    let labels = parse_labels(&fs::read_to_string(path)?)?;
    let k = labels.iter().flatten().max().map_or(0, |m| m + 1);
    Ok(Partition::new(k.max(1), labels)?)
}

pub fn write_labels(path: &Path, labels: &[Option<usize>]) -> Result<(), FormatError> {
    Ok(fs::write(path, serialize_labels(labels))?)
}

/// Partition files carry the `node,part` header.
pub fn write_partition(path: &Path, p: &Partition) -> Result<(), FormatError> {
    Ok(fs::write(
        path,
        serialize_labels_with_header(p.assignment(), "node,part"),
    )?)
}

/// Points CSV: one row per point, comma-separated coordinates, no header.
pub fn serialize_points(pc: &PointCloud) -> String {
    let mut out = String::new();
    for p in pc.points() {
        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn parse_points(text: &str) -> Result<PointCloud, FormatError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let coords: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse()).collect();
        let coords =
            coords.map_err(|_| parse_err(idx + 1, "coordinate is not a number"))?;
        points.push(coords);
    }
    Ok(PointCloud::new(points, None)?)
}

pub fn write_points(path: &Path, pc: &PointCloud) -> Result<(), FormatError> {
    Ok(fs::write(path, serialize_points(pc))?)
}

/// Spectrum CSV: `index,eigenvalue,residual`.
pub fn serialize_spectrum(s: &Spectrum) -> String {
    let mut out = String::from("index,eigenvalue,residual\n");
    for (i, (l, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
        let _ = writeln!(out, "{i},{l},{r}");
    }
    out
}

/// Embedding CSV: one row of coordinates per node.
pub fn serialize_embedding(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

// ---------------------------------------------------------------------------
// Plain PPM (P3 ASCII / P6 binary)

struct PpmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PpmCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<u64, FormatError> {
        let tok = self
            .next_token()
            .ok_or_else(|| FormatError::Ppm(format!("unexpected end of file reading {what}")))?;
        let s = std::str::from_utf8(tok)
            .map_err(|_| FormatError::Ppm(format!("{what} is not ASCII")))?;
        s.parse()
            .map_err(|_| FormatError::Ppm(format!("{what} is not a number: {s:?}")))
    }
}

/// Decode a plain PPM image (P3 or P6). Samples are kept raw; maxval up to
/// 65535 is supported (two-byte big-endian samples in P6).
pub fn parse_ppm(bytes: &[u8]) -> Result<RasterImage, FormatError> {
    let mut cur = PpmCursor { bytes, pos: 0 };
    let magic = cur
        .next_token()
        .ok_or_else(|| FormatError::Ppm("empty file".into()))?;
    let binary = match magic {
        b"P3" => false,
        b"P6" => true,
        other => {
            return Err(FormatError::Ppm(format!(
                "unsupported magic {:?}, expected P3 or P6",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cur.next_number("width")? as usize;
    let height = cur.next_number("height")? as usize;
    let maxval = cur.next_number("maxval")?;
    if maxval == 0 || maxval > 65_535 {
        return Err(FormatError::Ppm(format!("maxval {maxval} out of range")));
    }
    let maxval = maxval as u16;
    let count = width
        .checked_mul(height)
        .ok_or_else(|| FormatError::Ppm("image dimensions overflow".into()))?;
    let mut pixels = Vec::with_capacity(count);

    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(FormatError::Ppm("missing whitespace before raster".into()));
        }
        cur.pos += 1;
        let per_sample = if maxval > 255 { 2 } else { 1 };
        let need = count * 3 * per_sample;
        let raster = bytes
            .get(cur.pos..cur.pos + need)
            .ok_or_else(|| FormatError::Ppm("raster truncated".into()))?;
        for i in 0..count {
            let mut px = [0u16; 3];
            for (c, slot) in px.iter_mut().enumerate() {
                let off = (i * 3 + c) * per_sample;
                *slot = if per_sample == 2 {
                    u16::from_be_bytes([raster[off], raster[off + 1]])
                } else {
                    raster[off] as u16
                };
                if *slot > maxval {
                    return Err(FormatError::Ppm(format!(
                        "sample {} exceeds maxval {maxval}",
                        *slot
                    )));
                }
            }
            pixels.push(px);
        }
    } else {
        for _ in 0..count {
            let mut px = [0u16; 3];
            for slot in px.iter_mut() {
                let v = cur.next_number("sample")?;
                if v > maxval as u64 {
                    return Err(FormatError::Ppm(format!(
                        "sample {v} exceeds maxval {maxval}"
                    )));
                }
                *slot = v as u16;
            }
            pixels.push(px);
        }
    }
    Ok(RasterImage::new(width, height, maxval, pixels)?)
}

pub fn read_ppm(path: &Path) -> Result<RasterImage, FormatError> {
    parse_ppm(&fs::read(path)?)
}

/// Encode as binary P6 (one byte per sample when maxval ≤ 255, two above).
pub fn serialize_ppm_p6(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n{}\n", img.width(), img.height(), img.maxval()).into_bytes();
    let wide = img.maxval() > 255;
    for px in img.pixels() {
        for &s in px {
            if wide {
                out.extend_from_slice(&s.to_be_bytes());
            } else {
                out.push(s as u8);
            }
        }
    }
    out
}

pub fn serialize_ppm_p3(img: &RasterImage) -> String {
    let mut out = format!("P3\n{} {}\n{}\n", img.width(), img.height(), img.maxval());
    for px in img.pixels() {
        let _ = writeln!(out, "{} {} {}", px[0], px[1], px[2]);
    }
    out
}

pub fn write_ppm(path: &Path, img: &RasterImage) -> Result<(), FormatError> {
    Ok(fs::write(path, serialize_ppm_p6(img))?)
}

// ---------------------------------------------------------------------------
// JSON sidecars

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SparsifyStats {
    pub n: usize,
    pub m: usize,
    pub kept_edges: usize,
    pub sum_edge_probability: f64,
    pub words_exchanged: u64,
    pub runtime_ms: u64,
    pub tau: f64,
    pub seed: u64,
}

pub fn write_sparsify_stats(path: &Path, stats: &SparsifyStats) -> Result<(), FormatError> {
    Ok(fs::write(path, serde_json::to_string_pretty(stats)?)?)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TranscriptJson {
    pub beta: f64,
    pub seed: u64,
    pub rounds: usize,
    pub seed_count: usize,
    pub seed_nodes: Vec<usize>,
    pub words_per_round: Vec<u64>,
    pub total_words: u64,
    pub unlabeled: usize,
    pub misclassified_volume: Option<f64>,
    pub graph_volume: f64,
    pub max_conservation_drift: f64,
    pub max_norm_growth: f64,
}

impl From<&SimTranscript> for TranscriptJson {
    fn from(t: &SimTranscript) -> Self {
        Self {
            beta: t.beta,
            seed: t.seed,
            rounds: t.rounds,
            seed_count: t.seed_count,
            seed_nodes: t.seed_nodes.clone(),
            words_per_round: t.words_per_round.clone(),
            total_words: t.total_words,
            unlabeled: t.unlabeled_count,
            misclassified_volume: t.misclassified_volume,
            graph_volume: t.volume,
            max_conservation_drift: t.max_conservation_drift,
            max_norm_growth: t.max_norm_growth,
        }
    }
}

pub fn write_transcript(path: &Path, t: &SimTranscript) -> Result<(), FormatError> {
    Ok(fs::write(
        path,
        serde_json::to_string_pretty(&TranscriptJson::from(t))?,
    )?)
}
