//! Synthetic 2-D benchmarks, empty-region anomaly injection and CSV I/O.
//!
//! Every generator draws `round(0.2 n)` anomalies and `n - round(0.2 n)`
//! normal points from two fixed shapes, then adds Gaussian noise with standard
//! deviation `noise` truncated at three deviations. The shapes:
//!
//! | kind                 | normal class                       | anomaly class                          | region before noise  |
//! |----------------------|------------------------------------|----------------------------------------|----------------------|
//! | `two-spiral`         | spiral `r = θ / 3.5π`, θ ∈ [π/2, 7π/2] | same spiral rotated by π             | [-1, 1]²             |
//! | `crescent-full-moon` | disc, r ≤ 1                        | ring sector 1.5 ≤ r ≤ 2, θ ∈ [π, 2π]   | [-2, 2] × [-2, 1]    |
//! | `half-kernel`        | half ring 1.5 ≤ r ≤ 2, θ ∈ [0, π]  | half ring 0.5 ≤ r ≤ 1, θ ∈ [0, π]      | [-2, 2] × [0, 2]     |
//! | `corners`            | four L strips in the corners of [-1, 1]² | square [-0.3, 0.3]²              | [-1, 1]²             |
//! | `outliers`           | Gaussian blob, σ = 0.3, truncated at 3σ | ring 1.5 ≤ r ≤ 2.5                | [-2.5, 2.5]²         |
//! | `cluster-in-cluster` | ring 1.5 ≤ r ≤ 2                   | disc r ≤ 0.5                           | [-2, 2]²             |

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genotype::Label;
use crate::geometry::{dist2, BoundingBox};
use crate::rng::{self, derive_seed, StdRng};

/// Share of anomalies in generated datasets.
pub const ANOMALY_FRACTION: f64 = 0.2;

/// Margin added on each side when boxing a training set.
pub const BOX_MARGIN: f64 = 0.1;

/// Rejections tolerated for one injected point before `delta` shrinks.
const MAX_REJECTIONS: usize = 1000;

/// Labeled point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub dim: usize,
    pub name: String,
    pub seed: u64,
    /// Generator that produced the set, used to draw fresh test samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<GeneratorSpec>,
    /// The last `injected` points were added by [`inject_test_anomalies`].
    #[serde(default)]
    pub injected: usize,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<Label>, name: impl Into<String>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::param(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let dim = points.first().map_or(0, Vec::len);
        for p in &points {
            crate::geometry::check_dim(dim, p.len())?;
        }
        Ok(Self {
            points,
            labels,
            dim,
            name: name.into(),
            seed: 0,
            spec: None,
            injected: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], Label)> + '_ {
        self.points
            .iter()
            .map(Vec::as_slice)
            .zip(self.labels.iter().copied())
    }

    /// Points with the given label.
    pub fn points_of(&self, label: Label) -> Vec<&[f64]> {
        self.iter()
            .filter(|(_, l)| *l == label)
            .map(|(p, _)| p)
            .collect()
    }

    /// Data bounds expanded by 10 % per side: the domain of all volumes.
    pub fn bounding_box(&self) -> Result<BoundingBox> {
        BoundingBox::around(&self.points, BOX_MARGIN)
    }

    /// Indices of the injected test anomalies.
    pub fn injected_range(&self) -> std::ops::Range<usize> {
        self.len() - self.injected..self.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    TwoSpiral,
    CrescentFullMoon,
    HalfKernel,
    Corners,
    Outliers,
    ClusterInCluster,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::TwoSpiral,
        GeneratorKind::CrescentFullMoon,
        GeneratorKind::HalfKernel,
        GeneratorKind::Corners,
        GeneratorKind::Outliers,
        GeneratorKind::ClusterInCluster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::TwoSpiral => "two-spiral",
            GeneratorKind::CrescentFullMoon => "crescent-full-moon",
            GeneratorKind::HalfKernel => "half-kernel",
            GeneratorKind::Corners => "corners",
            GeneratorKind::Outliers => "outliers",
            GeneratorKind::ClusterInCluster => "cluster-in-cluster",
        }
    }

    /// Region holding every noiseless point, as `(lo, hi)`.
    pub fn region(self) -> ([f64; 2], [f64; 2]) {
        match self {
            GeneratorKind::TwoSpiral => ([-1.0, -1.0], [1.0, 1.0]),
            GeneratorKind::CrescentFullMoon => ([-2.0, -2.0], [2.0, 1.0]),
            GeneratorKind::HalfKernel => ([-2.0, 0.0], [2.0, 2.0]),
            GeneratorKind::Corners => ([-1.0, -1.0], [1.0, 1.0]),
            GeneratorKind::Outliers => ([-2.5, -2.5], [2.5, 2.5]),
            GeneratorKind::ClusterInCluster => ([-2.0, -2.0], [2.0, 2.0]),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::param(format!("unknown dataset kind `{s}`")))
    }
}

fn default_n_points() -> usize {
    400
}

fn default_noise() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n_points: usize, noise: f64, seed: u64) -> Self {
        Self {
            kind,
            n_points,
            noise,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Region holding every generated point, noise included.
    pub fn region(&self) -> BoundingBox {
        let (lo, hi) = self.kind.region();
        let m = 3.0 * self.noise;
        BoundingBox::new(vec![lo[0] - m, lo[1] - m], vec![hi[0] + m, hi[1] + m])
            .expect("static regions are valid")
    }

    pub fn n_anomalies(&self) -> usize {
        (ANOMALY_FRACTION * self.n_points as f64).round() as usize
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// `kind[:key=value,...]` with keys `n`, `noise` and `seed`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut spec = GeneratorSpec::new(kind.parse()?, default_n_points(), default_noise(), 0);
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::param(format!("expected key=value, got `{kv}`")))?;
            let bad = |_| Error::param(format!("bad value for `{k}`: `{v}`"));
            match k.trim() {
                "n" | "n_points" => spec.n_points = v.trim().parse().map_err(bad)?,
                "noise" => spec.noise = v.trim().parse().map_err(|_| Error::param(format!("bad noise `{v}`")))?,
                "seed" => spec.seed = v.trim().parse().map_err(bad)?,
                other => return Err(Error::param(format!("unknown generator key `{other}`"))),
            }
        }
        Ok(spec)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    if spec.n_points < 4 {
        return Err(Error::param(format!("n_points = {} < 4", spec.n_points)));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::param(format!("noise = {} must be >= 0", spec.noise)));
    }
    let mut rng = rng::seeded(spec.seed);
    let n_anom = spec.n_anomalies();
    let n_norm = spec.n_points - n_anom;
    let mut points = Vec::with_capacity(spec.n_points);
    let mut labels = Vec::with_capacity(spec.n_points);
    for (label, count) in [(Label::Normal, n_norm), (Label::Anomaly, n_anom)] {
        for _ in 0..count {
            let [x, y] = draw_shape(spec.kind, label, &mut rng);
            let p = vec![
                x + truncated_noise(spec.noise, &mut rng),
                y + truncated_noise(spec.noise, &mut rng),
            ];
            points.push(p);
            labels.push(label);
        }
    }
    Ok(Dataset {
        points,
        labels,
        dim: 2,
        name: spec.kind.name().to_string(),
        seed: spec.seed,
        spec: Some(spec.clone()),
        injected: 0,
    })
}

fn truncated_std_normal(rng: &mut StdRng) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= 3.0 {
            return z;
        }
    }
}

fn truncated_noise(sigma: f64, rng: &mut StdRng) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        sigma * truncated_std_normal(rng)
    }
}

/// Uniform point in the ring sector `r0 <= r <= r1`, `t0 <= θ <= t1`.
fn ring_sector(r0: f64, r1: f64, t0: f64, t1: f64, rng: &mut StdRng) -> [f64; 2] {
    let r = (r0 * r0 + rng.random::<f64>() * (r1 * r1 - r0 * r0)).sqrt();
    let t = t0 + rng.random::<f64>() * (t1 - t0);
    [r * t.cos(), r * t.sin()]
}

fn uniform_rect(lo: [f64; 2], hi: [f64; 2], rng: &mut StdRng) -> [f64; 2] {
    [
        lo[0] + rng.random::<f64>() * (hi[0] - lo[0]),
        lo[1] + rng.random::<f64>() * (hi[1] - lo[1]),
    ]
}

fn draw_shape(kind: GeneratorKind, label: Label, rng: &mut StdRng) -> [f64; 2] {
    use GeneratorKind::*;
    match (kind, label) {
        (TwoSpiral, _) => {
            let theta = PI * (0.5 + 3.0 * rng.random::<f64>());
            let r = theta / (3.5 * PI);
            let phase = if label == Label::Anomaly { PI } else { 0.0 };
            [r * (theta + phase).cos(), r * (theta + phase).sin()]
        }
        (CrescentFullMoon, Label::Normal) => ring_sector(0.0, 1.0, 0.0, 2.0 * PI, rng),
        (CrescentFullMoon, Label::Anomaly) => ring_sector(1.5, 2.0, PI, 2.0 * PI, rng),
        (HalfKernel, Label::Normal) => ring_sector(1.5, 2.0, 0.0, PI, rng),
        (HalfKernel, Label::Anomaly) => ring_sector(0.5, 1.0, 0.0, PI, rng),
        (Corners, Label::Normal) => {
            // each L is a 0.6 x 0.15 bar along the outer edge plus a
            // 0.15 x 0.45 bar down the side, chosen by area
            let sx = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let sy = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let [u, v] = if rng.random::<f64>() < 0.6 / 1.05 {
                uniform_rect([0.4, 0.85], [1.0, 1.0], rng)
            } else {
                uniform_rect([0.85, 0.4], [1.0, 0.85], rng)
            };
            [sx * u, sy * v]
        }
        (Corners, Label::Anomaly) => uniform_rect([-0.3, -0.3], [0.3, 0.3], rng),
        (Outliers, Label::Normal) => [0.3 * truncated_std_normal(rng), 0.3 * truncated_std_normal(rng)],
        (Outliers, Label::Anomaly) => ring_sector(1.5, 2.5, 0.0, 2.0 * PI, rng),
        (ClusterInCluster, Label::Normal) => ring_sector(1.5, 2.0, 0.0, 2.0 * PI, rng),
        (ClusterInCluster, Label::Anomaly) => ring_sector(0.0, 0.5, 0.0, 2.0 * PI, rng),
    }
}

/// 5 % of the diagonal of the training box.
pub fn default_delta(train: &Dataset) -> Result<f64> {
    Ok(0.05 * train.bounding_box()?.diagonal())
}

/// Test set plus the separation finally used for the injected points.
#[derive(Debug, Clone)]
pub struct Injection {
    pub test: Dataset,
    pub final_delta: f64,
}

/// Build a test set: a fresh draw from the training set's generator (or a copy
/// of the training set when it has none) followed by `n_anom` anomalies placed
/// farther than `delta` from every training point.
pub fn inject_test_anomalies(train: &Dataset, n_anom: usize, delta: f64, seed: u64) -> Result<Injection> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::param(format!("delta = {delta} must be > 0")));
    }
    let mut test = match &train.spec {
        Some(spec) => generate(&spec.with_seed(derive_seed(seed, &["resample"])))?,
        None => train.clone(),
    };
    test.name = train.name.clone();
    test.injected = 0;
    if n_anom == 0 {
        return Ok(Injection {
            test,
            final_delta: delta,
        });
    }

    let bbox = train.bounding_box()?;
    let mut rng = rng::seeded(seed);
    let mut delta = delta;
    let mut delta2 = delta * delta;
    for _ in 0..n_anom {
        let mut rejections = 0;
        loop {
            let p = bbox.sample(&mut rng);
            if train.points.iter().all(|q| dist2(&p, q) > delta2) {
                test.points.push(p);
                test.labels.push(Label::Anomaly);
                break;
            }
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                delta *= 0.9;
                delta2 = delta * delta;
                rejections = 0;
                warn!("anomaly injection: shrinking delta to {delta:.6}");
            }
        }
    }
    test.injected = n_anom;
    Ok(Injection {
        test,
        final_delta: delta,
    })
}

/// Write `x0,...,x{n-1},label`. Coordinates use the shortest representation
/// that parses back to the same `f64`.
pub fn save_csv(data: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(data, std::io::BufWriter::new(file))
}

pub fn write_csv<W: std::io::Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..data.dim).map(|d| format!("x{d}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (p, l) in data.iter() {
        let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        row.push(l.as_str().into());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path)
}

pub fn read_csv<R: std::io::Read>(reader: R, path: &Path) -> Result<Dataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].trim().is_empty()) {
        return Err(parse_err(1, "empty file".into()));
    }
    let dim = header.len() - 1;
    if dim == 0 || header[dim].trim() != "label" {
        return Err(parse_err(1, "expected header x0,...,x{n-1},label".into()));
    }
    for d in 0..dim {
        if header[d].trim() != format!("x{d}") {
            return Err(parse_err(1, format!("column {d} should be `x{d}`, got `{}`", &header[d])));
        }
    }

    let mut points = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != dim + 1 {
            return Err(parse_err(line, format!("expected {} fields, got {}", dim + 1, rec.len())));
        }
        let mut p = Vec::with_capacity(dim);
        for d in 0..dim {
            let v: f64 = rec[d]
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("bad number `{}`", &rec[d])))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite coordinate `{}`", &rec[d])));
            }
            p.push(v);
        }
        let label: Label = rec[dim]
            .parse()
            .map_err(|_| parse_err(line, format!("bad label `{}`", &rec[dim])))?;
        points.push(p);
        labels.push(label);
    }
    if points.is_empty() {
        return Err(parse_err(2, "no data rows".into()));
    }
    let name = path
        .file_stem()
        .map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned());
    Dataset::new(points, labels, name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(kind: GeneratorKind) -> GeneratorSpec {
        GeneratorSpec::new(kind, 400, 0.05, 11)
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        for kind in GeneratorKind::ALL {
            let a = generate(&spec(kind)).unwrap();
            assert_eq!(a, generate(&spec(kind)).unwrap());
            assert_ne!(a.points, generate(&spec(kind).with_seed(12)).unwrap().points);
        }
    }

    #[test]
    fn points_stay_in_documented_region() {
        for kind in GeneratorKind::ALL {
            for seed in 0..5 {
                let s = spec(kind).with_seed(seed);
                let d = generate(&s).unwrap();
                let region = s.region();
                assert!(d.points.iter().all(|p| region.contains(p)), "{kind}");
            }
        }
    }

    #[test]
    fn noiseless_shapes_hit_their_analytic_bounds() {
        // radius oracle for the ring/disc generators
        let radius = |p: &[f64]| (p[0] * p[0] + p[1] * p[1]).sqrt();
        let d = generate(&GeneratorSpec::new(GeneratorKind::ClusterInCluster, 500, 0.0, 1)).unwrap();
        for (p, l) in d.iter() {
            let r = radius(p);
            match l {
                Label::Normal => assert!((1.5 - 1e-12..=2.0 + 1e-12).contains(&r)),
                Label::Anomaly => assert!(r <= 0.5 + 1e-12),
            }
        }
        let d = generate(&GeneratorSpec::new(GeneratorKind::TwoSpiral, 500, 0.0, 1)).unwrap();
        for (p, _) in d.iter() {
            let r = radius(p);
            assert!((0.5 / 3.5 - 1e-12..=1.0 + 1e-12).contains(&r));
        }
        let d = generate(&GeneratorSpec::new(GeneratorKind::Corners, 500, 0.0, 1)).unwrap();
        for (p, l) in d.iter() {
            let inner = p[0].abs().max(p[1].abs());
            match l {
                Label::Normal => assert!(inner >= 0.85 && p[0].abs() >= 0.4 && p[1].abs() >= 0.4),
                Label::Anomaly => assert!(inner <= 0.3),
            }
        }
    }

    #[test]
    fn class_ratio() {
        for n in [4usize, 5, 99, 400, 1001] {
            let d = generate(&GeneratorSpec::new(GeneratorKind::Outliers, n, 0.01, 3)).unwrap();
            let expect = (0.2 * n as f64).round() as usize;
            assert_eq!(d.count(Label::Anomaly), expect);
            assert_eq!(d.count(Label::Normal), n - expect);
            assert!(d.count(Label::Anomaly) > 0 && d.count(Label::Normal) > 0);
        }
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Outliers, 3, 0.01, 3)).is_err());
    }

    #[test]
    fn spec_parsing() {
        let s: GeneratorSpec = "two-spiral:n=300,noise=0.1,seed=9".parse().unwrap();
        assert_eq!(s, GeneratorSpec::new(GeneratorKind::TwoSpiral, 300, 0.1, 9));
        let s: GeneratorSpec = "corners".parse().unwrap();
        assert_eq!(s.n_points, 400);
        assert!("spirals".parse::<GeneratorSpec>().is_err());
        assert!("corners:k=1".parse::<GeneratorSpec>().is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"corners\""));
    }

    #[test]
    fn injected_points_respect_separation() {
        let train = generate(&spec(GeneratorKind::TwoSpiral)).unwrap();
        let delta = default_delta(&train).unwrap();
        let inj = inject_test_anomalies(&train, 50, delta, 5).unwrap();
        let test = &inj.test;
        assert_eq!(test.injected, 50);
        assert_eq!(test.len(), train.len() + 50);
        assert_eq!(inj.final_delta, delta);
        for k in test.injected_range() {
            assert_eq!(test.labels[k], Label::Anomaly);
            let nearest = train
                .points
                .iter()
                .map(|q| dist2(&test.points[k], q).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest > delta);
        }
        // fresh resample, not a copy of the training set
        assert_ne!(test.points[..train.len()], train.points[..]);
    }

    #[test]
    fn impossible_delta_shrinks() {
        let train = generate(&GeneratorSpec::new(GeneratorKind::Corners, 40, 0.0, 1)).unwrap();
        let inj = inject_test_anomalies(&train, 5, 100.0, 2).unwrap();
        assert_eq!(inj.test.injected, 5);
        assert!(inj.final_delta < 100.0);
        for k in inj.test.injected_range() {
            assert!(train
                .points
                .iter()
                .all(|q| dist2(&inj.test.points[k], q).sqrt() > inj.final_delta));
        }
    }

    #[test]
    fn zero_injection_and_errors() {
        let train = generate(&spec(GeneratorKind::Outliers)).unwrap();
        let inj = inject_test_anomalies(&train, 0, 0.1, 1).unwrap();
        assert_eq!(inj.test.injected, 0);
        assert_eq!(inj.test.len(), train.len());
        assert!(inject_test_anomalies(&train, 3, 0.0, 1).is_err());
        let mut plain = train.clone();
        plain.spec = None;
        let inj = inject_test_anomalies(&plain, 2, 0.1, 1).unwrap();
        assert_eq!(inj.test.points[..plain.len()], plain.points[..]);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let p = Path::new("mem.csv");
        assert!(read_csv("".as_bytes(), p).is_err());
        assert!(read_csv("x0,x1,label\n".as_bytes(), p).is_err());
        let e = read_csv("x0,x1,label\n1,2,normal\n3,NaN,anomaly\n".as_bytes(), p).unwrap_err();
        assert!(e.to_string().contains("mem.csv:3"), "{e}");
        let e = read_csv("x0,x1,label\n1,2,normal\n3,4\n".as_bytes(), p).unwrap_err();
        assert!(e.to_string().contains(":3"), "{e}");
        let e = read_csv("x0,x1,label\n1,2,weird\n".as_bytes(), p).unwrap_err();
        assert!(e.to_string().contains(":2"), "{e}");
        assert!(read_csv("a,b,label\n1,2,normal\n".as_bytes(), p).is_err());
        assert!(read_csv("x0,x1,label\n1,inf,normal\n".as_bytes(), p).is_err());
    }

    #[test]
    fn csv_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spiral.csv");
        let d = generate(&spec(GeneratorKind::TwoSpiral)).unwrap();
        save_csv(&d, &path).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(back.points, d.points);
        assert_eq!(back.labels, d.labels);
        assert_eq!(back.name, "spiral");
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(rows in prop::collection::vec((any::<f64>(), any::<f64>(), any::<bool>()), 1..40)) {
            let rows: Vec<_> = rows.into_iter().filter(|(a, b, _)| a.is_finite() && b.is_finite()).collect();
            prop_assume!(!rows.is_empty());
            let points: Vec<Vec<f64>> = rows.iter().map(|(a, b, _)| vec![*a, *b]).collect();
            let labels = rows.iter().map(|r| if r.2 { Label::Anomaly } else { Label::Normal }).collect();
            let d = Dataset::new(points, labels, "p").unwrap();
            let mut buf = Vec::new();
            write_csv(&d, &mut buf).unwrap();
            let back = read_csv(buf.as_slice(), Path::new("p.csv")).unwrap();
            for (a, b) in back.points.iter().flatten().zip(d.points.iter().flatten()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(back.labels, d.labels);
        }

        #[test]
        fn parser_never_panics(s in "[x0-9,.\\-a-z\\n]{0,80}") {
            let _ = read_csv(s.as_bytes(), Path::new("f.csv"));
        }
    }
}
