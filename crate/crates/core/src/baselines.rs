//! Comparison detectors: variable-radius negative selection with detector
//! enrichment, and Gaussian naive Bayes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::genotype::Label;
use crate::geometry::{dist2, BoundingBox};
use crate::rng::seeded;

/// Non-self detector: a ball that must not reach any normal training point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereDetector {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl SphereDetector {
    pub fn covers(&self, p: &[f64]) -> bool {
        dist2(&self.center, p) <= self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsaModel {
    pub detectors: Vec<SphereDetector>,
    pub self_radius: f64,
    /// Covered share of the non-self part of the box, measured on the
    /// check samples drawn at training time.
    pub estimated_coverage: f64,
}

impl NsaModel {
    pub fn classify(&self, point: &[f64]) -> Label {
        nsa_classify(&self.detectors, point)
    }
}

/// Training settings; the self radius is a fraction of the box diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsaConfig {
    #[serde(default = "NsaConfig::default_radius_frac")]
    pub self_radius_frac: f64,
    #[serde(default = "NsaConfig::default_coverage")]
    pub target_coverage: f64,
    #[serde(default = "NsaConfig::default_max")]
    pub max_detectors: usize,
}

impl NsaConfig {
    fn default_radius_frac() -> f64 {
        0.02
    }
    fn default_coverage() -> f64 {
        0.99
    }
    fn default_max() -> usize {
        1000
    }
}

impl Default for NsaConfig {
    fn default() -> Self {
        Self {
            self_radius_frac: Self::default_radius_frac(),
            target_coverage: Self::default_coverage(),
            max_detectors: Self::default_max(),
        }
    }
}

/// Samples used to estimate coverage during training.
pub const COVERAGE_CHECK_SAMPLES: usize = 10_000;

/// Candidates tried per allowed detector before giving up.
const CANDIDATES_PER_DETECTOR: usize = 100;

struct SelfSet<'a> {
    normals: Vec<&'a [f64]>,
}

impl SelfSet<'_> {
    fn nearest(&self, p: &[f64]) -> f64 {
        self.normals
            .iter()
            .map(|q| dist2(p, q))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }
}

/// Train on the training set's bounding box with settings from `cfg`.
pub fn nsa_train_with(train: &Dataset, cfg: &NsaConfig, seed: u64) -> Result<NsaModel> {
    let bbox = train.bounding_box()?;
    nsa_train_in(
        train,
        &bbox,
        cfg.self_radius_frac * bbox.diagonal(),
        cfg.target_coverage,
        cfg.max_detectors,
        seed,
    )
}

/// V-detector training in the training set's bounding box.
pub fn nsa_train(
    train: &Dataset,
    self_radius: f64,
    target_coverage: f64,
    max_detectors: usize,
    seed: u64,
) -> Result<NsaModel> {
    let bbox = train.bounding_box()?;
    nsa_train_in(train, &bbox, self_radius, target_coverage, max_detectors, seed)
}

/// Random detectors are placed until the check samples outside the self
/// region are covered to `target_coverage` or `max_detectors` exist; then a
/// detector is centered at every training anomaly.
pub fn nsa_train_in(
    train: &Dataset,
    bbox: &BoundingBox,
    self_radius: f64,
    target_coverage: f64,
    max_detectors: usize,
    seed: u64,
) -> Result<NsaModel> {
    if !(self_radius > 0.0 && self_radius.is_finite()) {
        return Err(Error::param(format!("self radius {self_radius} must be positive")));
    }
    if !(0.0..=1.0).contains(&target_coverage) {
        return Err(Error::param(format!("target coverage {target_coverage} outside [0, 1]")));
    }
    let selfs = SelfSet {
        normals: train.points_of(Label::Normal),
    };
    if selfs.normals.is_empty() {
        return Err(Error::MissingClass("normal"));
    }
    let mut rng = seeded(seed);

    let check: Vec<Vec<f64>> = (0..COVERAGE_CHECK_SAMPLES)
        .map(|_| bbox.sample(&mut rng))
        .filter(|p| selfs.nearest(p) > self_radius)
        .collect();
    let mut covered = vec![false; check.len()];
    let mut n_covered = 0usize;
    let coverage = |covered: &mut [bool], n_covered: &mut usize, d: &SphereDetector| {
        for (c, p) in covered.iter_mut().zip(&check) {
            if !*c && d.covers(p) {
                *c = true;
                *n_covered += 1;
            }
        }
        if check.is_empty() {
            1.0
        } else {
            *n_covered as f64 / check.len() as f64
        }
    };

    let mut detectors: Vec<SphereDetector> = Vec::new();
    let mut estimate = if check.is_empty() { 1.0 } else { 0.0 };
    let mut tries = 0usize;
    let budget = max_detectors.saturating_mul(CANDIDATES_PER_DETECTOR);
    while estimate < target_coverage && detectors.len() < max_detectors && tries < budget {
        tries += 1;
        let center = bbox.sample(&mut rng);
        let d = selfs.nearest(&center);
        if d <= self_radius || detectors.iter().any(|det| det.covers(&center)) {
            continue;
        }
        let det = SphereDetector {
            center,
            radius: d - self_radius,
        };
        estimate = coverage(&mut covered, &mut n_covered, &det);
        detectors.push(det);
    }

    for p in train.points_of(Label::Anomaly) {
        let radius = selfs.nearest(p) - self_radius;
        if radius > 0.0 {
            let det = SphereDetector {
                center: p.to_vec(),
                radius,
            };
            estimate = coverage(&mut covered, &mut n_covered, &det);
            detectors.push(det);
        }
    }

    Ok(NsaModel {
        detectors,
        self_radius,
        estimated_coverage: estimate,
    })
}

/// Anomaly iff some detector contains the point.
pub fn nsa_classify(detectors: &[SphereDetector], point: &[f64]) -> Label {
    if detectors.iter().any(|d| d.covers(point)) {
        Label::Anomaly
    } else {
        Label::Normal
    }
}

/// Smallest variance allowed per dimension.
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub prior: f64,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl ClassStats {
    fn fit(points: &[&[f64]], dim: usize, total: usize) -> Self {
        let n = points.len() as f64;
        let mut mean = vec![0.0; dim];
        for p in points {
            for (m, x) in mean.iter_mut().zip(p.iter()) {
                *m += x / n;
            }
        }
        let mut var = vec![0.0; dim];
        for p in points {
            for ((v, x), m) in var.iter_mut().zip(p.iter()).zip(&mean) {
                *v += (x - m) * (x - m) / n;
            }
        }
        for v in &mut var {
            *v = v.max(VARIANCE_FLOOR);
        }
        Self {
            prior: n / total as f64,
            mean,
            var,
        }
    }

    /// `ln prior + sum_d ln N(x_d; mean_d, var_d)`.
    pub fn log_joint(&self, x: &[f64]) -> f64 {
        let mut s = self.prior.ln();
        for ((xd, m), v) in x.iter().zip(&self.mean).zip(&self.var) {
            s += -0.5 * (2.0 * PI * v).ln() - (xd - m) * (xd - m) / (2.0 * v);
        }
        s
    }
}

/// Gaussian naive Bayes with one diagonal Gaussian per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub normal: ClassStats,
    pub anomaly: ClassStats,
}

impl NaiveBayesModel {
    pub fn classify(&self, point: &[f64]) -> Label {
        nb_classify(self, point)
    }

    /// Unnormalized log posteriors `(normal, anomaly)`.
    pub fn log_posteriors(&self, point: &[f64]) -> (f64, f64) {
        (self.normal.log_joint(point), self.anomaly.log_joint(point))
    }
}

pub fn nb_train(train: &Dataset) -> Result<NaiveBayesModel> {
    let normals = train.points_of(Label::Normal);
    let anomalies = train.points_of(Label::Anomaly);
    if normals.is_empty() {
        return Err(Error::MissingClass("normal"));
    }
    if anomalies.is_empty() {
        return Err(Error::MissingClass("anomaly"));
    }
    Ok(NaiveBayesModel {
        normal: ClassStats::fit(&normals, train.dim, train.len()),
        anomaly: ClassStats::fit(&anomalies, train.dim, train.len()),
    })
}

/// Maximum posterior class; ties go to Anomaly.
pub fn nb_classify(model: &NaiveBayesModel, point: &[f64]) -> Label {
    let (n, a) = model.log_posteriors(point);
    if a >= n {
        Label::Anomaly
    } else {
        Label::Normal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate, GeneratorKind, GeneratorSpec};

    fn one_d(normals: &[f64], anomalies: &[f64]) -> Dataset {
        let mut points: Vec<Vec<f64>> = normals.iter().map(|&x| vec![x]).collect();
        points.extend(anomalies.iter().map(|&x| vec![x]));
        let mut labels = vec![Label::Normal; normals.len()];
        labels.extend(vec![Label::Anomaly; anomalies.len()]);
        Dataset::new(points, labels, "1d").unwrap()
    }

    #[test]
    fn nsa_construction_predicates() {
        let d = generate(&GeneratorSpec::new(GeneratorKind::CrescentFullMoon, 300, 0.02, 5)).unwrap();
        let b = d.bounding_box().unwrap();
        let r = 0.02 * b.diagonal();
        let m = nsa_train(&d, r, 0.99, 1000, 7).unwrap();
        assert!(!m.detectors.is_empty());
        let normals = d.points_of(Label::Normal);
        for det in &m.detectors {
            assert!(det.radius > 0.0);
            for p in &normals {
                assert!(!det.covers(p));
                assert!(dist2(p, &det.center).sqrt() > r);
            }
        }
        assert_eq!(m, nsa_train(&d, r, 0.99, 1000, 7).unwrap());
    }

    #[test]
    fn nsa_coverage_estimate_matches_fresh_measurement() {
        let d = generate(&GeneratorSpec::new(GeneratorKind::Outliers, 300, 0.02, 2)).unwrap();
        let b = d.bounding_box().unwrap();
        let r = 0.02 * b.diagonal();
        let m = nsa_train(&d, r, 0.95, 1000, 3).unwrap();
        let normals = d.points_of(Label::Normal);
        let mut rng = seeded(99);
        let (mut nonself, mut hit) = (0usize, 0usize);
        for _ in 0..40_000 {
            let p = b.sample(&mut rng);
            if normals.iter().all(|q| dist2(q, &p).sqrt() > r) {
                nonself += 1;
                if m.detectors.iter().any(|det| dist2(&det.center, &p) <= det.radius * det.radius) {
                    hit += 1;
                }
            }
        }
        let fresh = hit as f64 / nonself as f64;
        assert!((fresh - m.estimated_coverage).abs() < 0.02, "fresh {fresh} est {}", m.estimated_coverage);
    }

    #[test]
    fn nsa_rejects_missing_normals() {
        let d = one_d(&[], &[1.0, 2.0]);
        assert!(matches!(nsa_train(&d, 0.1, 0.9, 10, 1), Err(Error::MissingClass("normal"))));
    }

    #[test]
    fn nsa_classification() {
        assert_eq!(nsa_classify(&[], &[1.0, 2.0]), Label::Normal);
        let dets = vec![
            SphereDetector { center: vec![0.0, 0.0], radius: 0.5 },
            SphereDetector { center: vec![1.0, 1.0], radius: 0.2 },
        ];
        assert_eq!(nsa_classify(&dets, &[1.0, 1.0]), Label::Anomaly);
        for gx in 0..25 {
            for gy in 0..20 {
                let p = [gx as f64 / 20.0, gy as f64 / 16.0];
                let oracle = dets.iter().any(|d| ((p[0] - d.center[0]).powi(2) + (p[1] - d.center[1]).powi(2)).sqrt() <= d.radius);
                assert_eq!(nsa_classify(&dets, &p) == Label::Anomaly, oracle);
            }
        }
    }

    #[test]
    fn nb_separated_gaussians() {
        let d = one_d(&[-2.1, -2.0, -1.9, -2.05], &[1.9, 2.0, 2.1, 1.95]);
        let m = nb_train(&d).unwrap();
        assert_eq!(m.classify(&[-0.5]), Label::Normal);
        assert_eq!(m.classify(&[0.5]), Label::Anomaly);
        assert!((m.normal.prior + m.anomaly.prior - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nb_tie_goes_to_anomaly() {
        let d = one_d(&[-1.0, -3.0], &[1.0, 3.0]);
        let m = nb_train(&d).unwrap();
        assert_eq!(m.classify(&[0.0]), Label::Anomaly);
    }

    #[test]
    fn nb_needs_both_classes() {
        assert!(nb_train(&one_d(&[1.0, 2.0], &[])).is_err());
        assert!(nb_train(&one_d(&[], &[1.0, 2.0])).is_err());
    }

    #[test]
    fn nb_variance_floor() {
        let d = one_d(&[1.0, 1.0], &[2.0, 3.0]);
        let m = nb_train(&d).unwrap();
        assert_eq!(m.normal.var, vec![VARIANCE_FLOOR]);
    }

    #[test]
    fn nb_log_space_matches_direct_probabilities() {
        let d = generate(&GeneratorSpec::new(GeneratorKind::HalfKernel, 100, 0.05, 1)).unwrap();
        let m = nb_train(&d).unwrap();
        let pdf = |x: f64, mu: f64, v: f64| (-(x - mu).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
        for p in d.points.iter().take(30) {
            let joint = |c: &ClassStats| c.prior * pdf(p[0], c.mean[0], c.var[0]) * pdf(p[1], c.mean[1], c.var[1]);
            let (jn, ja) = (joint(&m.normal), joint(&m.anomaly));
            let direct = ja / (jn + ja);
            let (ln_n, ln_a) = m.log_posteriors(p);
            let from_logs = 1.0 / (1.0 + (ln_n - ln_a).exp());
            assert!((direct - from_logs).abs() < 1e-9);
            // a shared shift of both log likelihoods leaves the decision alone
            assert_eq!(ln_a + 7.5 >= ln_n + 7.5, m.classify(p) == Label::Anomaly);
        }
    }
}
