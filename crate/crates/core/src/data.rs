//! Synthetic point-cloud generators, Gaussian-kernel similarity graphs, and
//! pixel-grid ingestion.

use crate::graph::{GraphError, Partition, WeightedGraph};
use crate::rng::Rng;
use alloc::vec::Vec;
use libm::{cos, exp, sin, sqrt};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
    #[error("point {0} does not match the cloud dimension")]
    DimensionMismatch(usize),
    #[error("kernel bandwidth sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("weight floor must be nonnegative, got {0}")]
    InvalidWeightFloor(f64),
    #[error("raster image is malformed: {0}")]
    BadImage(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A set of points in R^d with an optional ground-truth partition.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
    truth: Option<Partition>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, truth: Option<Partition>) -> Result<Self, DataError> {
        if points.is_empty() {
            return Err(DataError::TooFewPoints { got: 0, need: 1 });
        }
        let dim = points[0].len();
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(DataError::DimensionMismatch(i));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(DataError::NonFinitePoint(i));
            }
        }
        Ok(Self { points, dim, truth })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn truth(&self) -> Option<&Partition> {
        self.truth.as_ref()
    }
}

/// Interleaved half-circle pair: radius 1, second moon shifted by (0.5, 0.5)
/// and reflected downward. Points split evenly between the moons, angles
/// uniform, Gaussian positional noise with standard deviation `noise`.
pub fn gen_twomoons(n: usize, noise: f64, seed: u64) -> Result<PointCloud, DataError> {
    if n < 2 {
        return Err(DataError::TooFewPoints { got: n, need: 2 });
    }
    let mut rng = Rng::stream(seed, &[0x6d6f_6f6e_73]);
    let first = n - n / 2;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let theta = rng.uniform(0.0, core::f64::consts::PI);
        let (mut x, mut y) = if i < first {
            (cos(theta), sin(theta))
        } else {
            (0.5 + cos(theta), 0.5 - sin(theta))
        };
        x += noise * rng.gaussian();
        y += noise * rng.gaussian();
        points.push(alloc::vec![x, y]);
        labels.push(usize::from(i >= first));
    }
    let truth = Partition::from_labels(2, labels)?;
    PointCloud::new(points, Some(truth))
}

pub const GAUSSIANS_DEFAULT_MEANS: [[f64; 2]; 3] = [[0.0, 0.0], [2.0, 0.0], [1.0, 1.7320508075688772]];

/// Uniform mixture of three isotropic Gaussians. Means default to an
/// equilateral triangle of side 2; `variance` is per coordinate.
pub fn gen_gaussians(n: usize, variance: f64, seed: u64) -> Result<PointCloud, DataError> {
    gen_gaussians_with_means(n, variance, &GAUSSIANS_DEFAULT_MEANS, seed)
}

pub fn gen_gaussians_with_means(
    n: usize,
    variance: f64,
    means: &[[f64; 2]; 3],
    seed: u64,
) -> Result<PointCloud, DataError> {
    if n < 3 {
        return Err(DataError::TooFewPoints { got: n, need: 3 });
    }
    let std = sqrt(variance.max(0.0));
    let mut rng = Rng::stream(seed, &[0x6761_7573_73]);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let c = rng.below(3);
        let x = means[c][0] + std * rng.gaussian();
        let y = means[c][1] + std * rng.gaussian();
        points.push(alloc::vec![x, y]);
        labels.push(c);
    }
    let truth = Partition::from_labels(3, labels)?;
    PointCloud::new(points, Some(truth))
}

#[derive(Debug, Clone, Copy)]
pub struct SimilarityConfig {
    /// Gaussian kernel bandwidth σ in w(u,v) = exp(−‖u−v‖² / 2σ²).
    pub sigma: f64,
    /// Pairs with weight strictly below this are dropped (0 keeps all pairs).
    pub weight_floor: f64,
}

impl SimilarityConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            weight_floor: 0.0,
        }
    }
}

/// Dense Gaussian-kernel similarity graph over all point pairs.
pub fn build_similarity_graph(
    pc: &PointCloud,
    cfg: &SimilarityConfig,
) -> Result<WeightedGraph, DataError> {
    if pc.len() < 2 {
        return Err(DataError::TooFewPoints {
            got: pc.len(),
            need: 2,
        });
    }
    if !(cfg.sigma > 0.0) {
        return Err(DataError::InvalidSigma(cfg.sigma));
    }
    if cfg.weight_floor < 0.0 {
        return Err(DataError::InvalidWeightFloor(cfg.weight_floor));
    }
    let n = pc.len();
    let inv = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    let points = pc.points();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d2 = 0.0;
            for (a, b) in points[i].iter().zip(&points[j]) {
                let d = a - b;
                d2 += d * d;
            }
            let w = exp(-d2 * inv);
            if w >= cfg.weight_floor {
                edges.push((i, j, w));
            }
        }
    }
    Ok(WeightedGraph::from_edges(n, edges)?)
}

/// Decoded pixel grid; samples are raw (no rescaling), up to 16 bits each.
#[derive(Debug, Clone)]
pub struct RasterImage {
    width: usize,
    height: usize,
    maxval: u16,
    /// Row-major (r, g, b) triples.
    pixels: Vec<[u16; 3]>,
}

impl RasterImage {
    pub fn new(
        width: usize,
        height: usize,
        maxval: u16,
        pixels: Vec<[u16; 3]>,
    ) -> Result<Self, DataError> {
        if width == 0 || height == 0 {
            return Err(DataError::BadImage("zero dimension"));
        }
        if maxval == 0 {
            return Err(DataError::BadImage("zero maxval"));
        }
        if pixels.len() != width * height {
            return Err(DataError::BadImage("pixel count does not match dimensions"));
        }
        if pixels.iter().any(|p| p.iter().any(|&s| s > maxval)) {
            return Err(DataError::BadImage("sample exceeds maxval"));
        }
        Ok(Self {
            width,
            height,
            maxval,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[[u16; 3]] {
        &self.pixels
    }
}

/// One point per pixel: (column, row, r, g, b) as raw reals.
pub fn image_to_points(img: &RasterImage) -> PointCloud {
    let mut points = Vec::with_capacity(img.width * img.height);
    for row in 0..img.height {
        for col in 0..img.width {
            let [r, g, b] = img.pixels[row * img.width + col];
            points.push(alloc::vec![
                col as f64,
                row as f64,
                r as f64,
                g as f64,
                b as f64
            ]);
        }
    }
    PointCloud::new(points, None).expect("pixel coordinates are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn twomoons_even_split() {
        let pc = gen_twomoons(1000, 0.05, 1).unwrap();
        assert_eq!(pc.len(), 1000);
        let truth = pc.truth().unwrap();
        assert_eq!(truth.part_sizes(), vec![500, 500]);
    }

    #[test]
    fn twomoons_noiseless_on_unit_circles() {
        let pc = gen_twomoons(201, 0.0, 7).unwrap();
        let truth = pc.truth().unwrap();
        for (i, p) in pc.points().iter().enumerate() {
            let (cx, cy) = if truth.part_of(i) == Some(0) {
                (0.0, 0.0)
            } else {
                (0.5, 0.5)
            };
            let r = sqrt((p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy));
            assert!((r - 1.0).abs() < 1e-12, "radius {r}");
        }
        // Odd n: first moon gets the extra point.
        assert_eq!(truth.part_sizes(), vec![101, 100]);
    }

    #[test]
    fn twomoons_seeds_differ() {
        let a = gen_twomoons(50, 0.0, 1).unwrap();
        let b = gen_twomoons(50, 0.0, 2).unwrap();
        let c = gen_twomoons(50, 0.0, 1).unwrap();
        assert_ne!(a.points()[0], b.points()[0]);
        assert_eq!(a.points(), c.points());
    }

    #[test]
    fn gaussians_counts_near_thirds() {
        let n = 3000;
        let pc = gen_gaussians(n, 0.04, 3).unwrap();
        let sizes = pc.truth().unwrap().part_sizes();
        // Binomial(n, 1/3): 3 sigma is about 78 points.
        let expect = n as f64 / 3.0;
        let three_sigma = 3.0 * sqrt(n as f64 * (1.0 / 3.0) * (2.0 / 3.0));
        for &s in &sizes {
            assert!(
                (s as f64 - expect).abs() < three_sigma,
                "component size {s} vs {expect}"
            );
        }
    }

    #[test]
    fn gaussians_zero_variance_point_masses() {
        let pc = gen_gaussians(90, 0.0, 5).unwrap();
        let truth = pc.truth().unwrap();
        for (i, p) in pc.points().iter().enumerate() {
            let c = truth.part_of(i).unwrap();
            assert_eq!(p[0], GAUSSIANS_DEFAULT_MEANS[c][0]);
            assert_eq!(p[1], GAUSSIANS_DEFAULT_MEANS[c][1]);
        }
    }

    #[test]
    fn similarity_weights_match_kernel() {
        let pc = PointCloud::new(
            vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![3.0, 4.0]],
            None,
        )
        .unwrap();
        let sigma = 2.0;
        let g = build_similarity_graph(&pc, &SimilarityConfig::new(sigma)).unwrap();
        // Duplicate points: exp(0) = 1.
        assert!((g.edge_weight(0, 1).unwrap() - 1.0).abs() < 1e-15);
        // Distance 5: exp(−25 / (2·4)).
        let expect = exp(-25.0 / 8.0);
        assert!((g.edge_weight(0, 2).unwrap() - expect).abs() < 1e-15);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn similarity_distance_sigma_sqrt2_gives_inv_e() {
        let sigma = 0.7;
        let d = sigma * sqrt(2.0);
        let pc = PointCloud::new(vec![vec![0.0], vec![d]], None).unwrap();
        let g = build_similarity_graph(&pc, &SimilarityConfig::new(sigma)).unwrap();
        assert!((g.edge_weight(0, 1).unwrap() - exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn similarity_complete_edge_count_and_floor() {
        let pc = gen_twomoons(40, 0.05, 9).unwrap();
        let g = build_similarity_graph(&pc, &SimilarityConfig::new(0.1)).unwrap();
        assert_eq!(g.edge_count(), 40 * 39 / 2);
        for e in g.edges() {
            assert!(e.w > 0.0 && e.w <= 1.0, "kernel weight {} out of (0, 1]", e.w);
        }
        let mut cfg = SimilarityConfig::new(0.1);
        cfg.weight_floor = 1e-3;
        let h = build_similarity_graph(&pc, &cfg).unwrap();
        assert!(h.edge_count() < g.edge_count());
        for e in h.edges() {
            assert!(e.w >= 1e-3);
        }
    }

    #[test]
    fn similarity_rejects_bad_config() {
        let pc = gen_twomoons(10, 0.05, 1).unwrap();
        assert!(matches!(
            build_similarity_graph(&pc, &SimilarityConfig::new(0.0)),
            Err(DataError::InvalidSigma(_))
        ));
        let mut cfg = SimilarityConfig::new(1.0);
        cfg.weight_floor = -0.1;
        assert!(matches!(
            build_similarity_graph(&pc, &cfg),
            Err(DataError::InvalidWeightFloor(_))
        ));
    }

    #[test]
    fn image_points_are_pixel_tuples() {
        let img = RasterImage::new(
            2,
            2,
            255,
            vec![[1, 2, 3], [4, 5, 6], [7, 8, 9], [10, 11, 12]],
        )
        .unwrap();
        let pc = image_to_points(&img);
        assert_eq!(pc.len(), 4);
        assert_eq!(pc.dim(), 5);
        assert_eq!(pc.points()[0], vec![0.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(pc.points()[1], vec![1.0, 0.0, 4.0, 5.0, 6.0]);
        assert_eq!(pc.points()[2], vec![0.0, 1.0, 7.0, 8.0, 9.0]);
        assert_eq!(pc.points()[3], vec![1.0, 1.0, 10.0, 11.0, 12.0]);
    }

    #[test]
    fn image_full_sculpture_size() {
        let pixels = vec![[0u16, 0, 0]; 73 * 160];
        let img = RasterImage::new(160, 73, 255, pixels).unwrap();
        assert_eq!(image_to_points(&img).len(), 11_680);
    }

    #[test]
    fn grayscale_image_has_equal_channels() {
        let pixels: Vec<[u16; 3]> = (0..6).map(|i| [i as u16 * 40; 3]).collect();
        let img = RasterImage::new(3, 2, 255, pixels).unwrap();
        for p in image_to_points(&img).points() {
            assert_eq!(p[2], p[3]);
            assert_eq!(p[3], p[4]);
        }
    }

    #[test]
    fn raster_validation() {
        assert!(matches!(
            RasterImage::new(2, 2, 255, vec![[0, 0, 0]; 3]),
            Err(DataError::BadImage(_))
        ));
        assert!(matches!(
            RasterImage::new(1, 1, 100, vec![[101, 0, 0]]),
            Err(DataError::BadImage(_))
        ));
    }

    #[test]
    fn point_cloud_validation() {
        assert!(matches!(
            PointCloud::new(vec![vec![0.0], vec![f64::NAN]], None),
            Err(DataError::NonFinitePoint(1))
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![0.0], vec![0.0, 1.0]], None),
            Err(DataError::DimensionMismatch(1))
        ));
    }
}
