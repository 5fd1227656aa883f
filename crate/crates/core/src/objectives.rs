//! Fitness of a labeled diagram: classification metrics plus three
//! volume-based objectives, all oriented for maximization.
//!
//! With `D_i` the training points in cell `i`, `v_i` the cell volume and `n`
//! the input dimension:
//!
//! * compactness sums `vol(hull(D_i)) / v_i` over cells with `|D_i| > n`;
//! * multiplicative compactness weights each of those terms by `|D_i| - n`;
//! * empty volume sums `v_i / (1 + 2 ln(|D_i| + 1))` over anomaly cells.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::genotype::{Individual, Label};
use crate::geometry::{
    self, cell_counts, cell_volumes_exact_2d, cell_volumes_from_counts, convex_hull_2d,
    hull_volume_with_samples, BoundingBox, SampleSet, VolumeReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveId {
    Accuracy,
    Recall,
    Specificity,
    Compactness,
    MultCompactness,
    EmptyVolume,
}

impl ObjectiveId {
    /// One-letter code used in set names such as `a/m/t`.
    pub fn code(self) -> char {
        match self {
            ObjectiveId::Accuracy => 'a',
            ObjectiveId::Recall => 'r',
            ObjectiveId::Specificity => 's',
            ObjectiveId::Compactness => 'c',
            ObjectiveId::MultCompactness => 'm',
            ObjectiveId::EmptyVolume => 't',
        }
    }

    fn from_code(c: &str) -> Option<Self> {
        Some(match c {
            "a" => ObjectiveId::Accuracy,
            "r" => ObjectiveId::Recall,
            "s" => ObjectiveId::Specificity,
            "c" => ObjectiveId::Compactness,
            "m" => ObjectiveId::MultCompactness,
            "t" => ObjectiveId::EmptyVolume,
            _ => return None,
        })
    }

    fn needs_hulls(self) -> bool {
        matches!(self, ObjectiveId::Compactness | ObjectiveId::MultCompactness)
    }

    fn needs_volumes(self) -> bool {
        self.needs_hulls() || self == ObjectiveId::EmptyVolume
    }
}

/// Ordered, duplicate-free list of objectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectiveSet(Vec<ObjectiveId>);

impl ObjectiveSet {
    pub fn new(ids: Vec<ObjectiveId>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::param("objective set is empty"));
        }
        for (k, id) in ids.iter().enumerate() {
            if ids[..k].contains(id) {
                return Err(Error::param(format!("objective {id:?} listed twice")));
            }
        }
        Ok(Self(ids))
    }

    pub fn ids(&self) -> &[ObjectiveId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, id: ObjectiveId) -> Option<usize> {
        self.0.iter().position(|&x| x == id)
    }

    /// Accuracy and compactness.
    pub fn ac() -> Self {
        "a/c".parse().unwrap()
    }

    /// Accuracy, compactness and empty volume.
    pub fn act() -> Self {
        "a/c/t".parse().unwrap()
    }

    /// Accuracy and multiplicative compactness.
    pub fn am() -> Self {
        "a/m".parse().unwrap()
    }

    /// Accuracy, multiplicative compactness and empty volume.
    pub fn amt() -> Self {
        "a/m/t".parse().unwrap()
    }
}

impl fmt::Display for ObjectiveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self.0.iter().map(|id| id.code().to_string()).collect();
        f.write_str(&codes.join("/"))
    }
}

impl FromStr for ObjectiveSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ids = s
            .split('/')
            .map(|c| {
                ObjectiveId::from_code(c.trim())
                    .ok_or_else(|| Error::param(format!("unknown objective code `{c}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ids)
    }
}

impl Serialize for ObjectiveSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ObjectiveSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Objective values aligned with an [`ObjectiveSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(pub Vec<f64>);

impl ObjectiveVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Confusion counts with anomaly as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Anomaly, Label::Anomaly) => self.tp += 1,
            (Label::Anomaly, Label::Normal) => self.fp += 1,
            (Label::Normal, Label::Normal) => self.tn += 1,
            (Label::Normal, Label::Anomaly) => self.fn_ += 1,
        }
    }

    pub fn accuracy(&self) -> f64 {
        metric(self, Metric::Accuracy)
    }

    pub fn recall(&self) -> f64 {
        metric(self, Metric::Recall)
    }

    pub fn specificity(&self) -> f64 {
        metric(self, Metric::Specificity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    Recall,
    Specificity,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Accuracy, Metric::Recall, Metric::Specificity];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Recall => "recall",
            Metric::Specificity => "specificity",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::param(format!("unknown metric `{s}`")))
    }
}

/// Metric value in `[0, 1]`. A zero denominator (no positives for recall, no
/// negatives for specificity, empty counts) yields 0.
pub fn metric(c: &ConfusionCounts, which: Metric) -> f64 {
    let (num, den) = match which {
        Metric::Accuracy => (c.tp + c.tn, c.total()),
        Metric::Recall => (c.tp, c.tp + c.fn_),
        Metric::Specificity => (c.tn, c.tn + c.fp),
    };
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// True when `which` has a zero denominator for these counts.
pub fn metric_is_degenerate(c: &ConfusionCounts, which: Metric) -> bool {
    match which {
        Metric::Accuracy => c.total() == 0,
        Metric::Recall => c.tp + c.fn_ == 0,
        Metric::Specificity => c.tn + c.fp == 0,
    }
}

pub fn confusion(ind: &Individual, data: &Dataset) -> Result<ConfusionCounts> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let parts = geometry::assign_points(&data.points, &ind.sites)?;
    Ok(confusion_from_parts(ind, data, &parts))
}

fn confusion_from_parts(ind: &Individual, data: &Dataset, parts: &[Vec<usize>]) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for (site, part) in ind.sites.iter().zip(parts) {
        for &k in part {
            c.record(site.label, data.labels[k]);
        }
    }
    c
}

/// How cell volumes are measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeomConfig {
    /// Monte Carlo sample count when volumes are not exact.
    pub n_samples: usize,
    /// Seed of the shared sample set.
    pub seed: u64,
    /// Use exact clipping in two dimensions.
    pub exact_2d: bool,
}

impl Default for GeomConfig {
    fn default() -> Self {
        Self {
            n_samples: 50_000,
            seed: 0,
            exact_2d: true,
        }
    }
}

/// A bounding box plus, when volumes are estimated, the sample set shared by
/// every individual evaluated in this context.
#[derive(Debug, Clone)]
pub struct VolumeContext {
    bbox: BoundingBox,
    samples: Option<SampleSet>,
}

impl VolumeContext {
    pub fn new(bbox: &BoundingBox, cfg: &GeomConfig) -> Result<Self> {
        let samples = if bbox.dim() == 2 && cfg.exact_2d {
            None
        } else {
            Some(SampleSet::new(bbox, cfg.n_samples, cfg.seed)?)
        };
        Ok(Self {
            bbox: bbox.clone(),
            samples,
        })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn is_exact(&self) -> bool {
        self.samples.is_none()
    }

    fn cell_volumes(&self, ind: &Individual) -> Result<(Vec<f64>, usize)> {
        match &self.samples {
            None => Ok((cell_volumes_exact_2d(&ind.sites, &self.bbox)?, 0)),
            Some(s) => {
                let counts = cell_counts(&ind.sites, s)?;
                Ok((cell_volumes_from_counts(&counts, s), s.len()))
            }
        }
    }

    fn hull_volume(&self, points: &[&[f64]]) -> f64 {
        let dim = self.bbox.dim();
        if points.len() <= dim {
            return 0.0;
        }
        match (dim, &self.samples) {
            (1, _) => {
                let (lo, hi) = points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[0]), h.max(p[0])));
                hi - lo
            }
            (2, _) => convex_hull_2d(points).area(),
            (_, Some(s)) => hull_volume_with_samples(points, s),
            (_, None) => unreachable!("exact volumes only in 2-D"),
        }
    }
}

/// Partition of the data plus the volumes it needs.
#[derive(Debug, Clone)]
pub struct CellAnalysis {
    pub parts: Vec<Vec<usize>>,
    pub report: VolumeReport,
}

/// Assign the data to cells and measure cell volumes, and hull volumes when
/// `with_hulls` is set.
pub fn analyze(
    ind: &Individual,
    data: &Dataset,
    ctx: &VolumeContext,
    with_hulls: bool,
) -> Result<CellAnalysis> {
    if let Some(d) = ind.dim() {
        geometry::check_dim(ctx.bbox.dim(), d)?;
    }
    let parts = geometry::assign_points(&data.points, &ind.sites)?;
    let (cell_volumes, samples_used) = ctx.cell_volumes(ind)?;
    let counts: Vec<usize> = parts.iter().map(Vec::len).collect();
    let hull_volumes = if with_hulls {
        parts
            .iter()
            .map(|part| {
                let pts: Vec<&[f64]> = part.iter().map(|&k| data.points[k].as_slice()).collect();
                ctx.hull_volume(&pts)
            })
            .collect()
    } else {
        vec![0.0; parts.len()]
    };
    Ok(CellAnalysis {
        parts,
        report: VolumeReport {
            cell_volumes,
            hull_volumes,
            counts,
            samples_used,
        },
    })
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Per-cell `hull / v_i` ratios, 0 for sparse cells (`|D_i| <= n`) and
/// zero-volume cells.
pub fn compactness_terms(report: &VolumeReport, dim: usize) -> Vec<f64> {
    report
        .counts
        .iter()
        .zip(&report.cell_volumes)
        .zip(&report.hull_volumes)
        .map(|((&count, &v), &h)| {
            if count > dim && v > 0.0 {
                finite_or_zero(h / v)
            } else {
                0.0
            }
        })
        .collect()
}

pub fn compactness_from(report: &VolumeReport, dim: usize) -> f64 {
    compactness_terms(report, dim).iter().sum()
}

pub fn mult_compactness_from(report: &VolumeReport, dim: usize) -> f64 {
    compactness_terms(report, dim)
        .iter()
        .zip(&report.counts)
        .map(|(t, &c)| if c > dim { (c - dim) as f64 * t } else { 0.0 })
        .sum()
}

pub fn empty_volume_from(ind: &Individual, report: &VolumeReport) -> f64 {
    ind.sites
        .iter()
        .zip(report.counts.iter().zip(&report.cell_volumes))
        .filter(|(s, _)| s.label == Label::Anomaly)
        .map(|(_, (&c, &v))| v / (1.0 + 2.0 * ((c + 1) as f64).ln()))
        .sum()
}

pub fn compactness(ind: &Individual, data: &Dataset, bbox: &BoundingBox, geom: &GeomConfig) -> Result<f64> {
    let ctx = VolumeContext::new(bbox, geom)?;
    let a = analyze(ind, data, &ctx, true)?;
    Ok(compactness_from(&a.report, bbox.dim()))
}

pub fn mult_compactness(ind: &Individual, data: &Dataset, bbox: &BoundingBox, geom: &GeomConfig) -> Result<f64> {
    let ctx = VolumeContext::new(bbox, geom)?;
    let a = analyze(ind, data, &ctx, true)?;
    Ok(mult_compactness_from(&a.report, bbox.dim()))
}

pub fn empty_volume(ind: &Individual, data: &Dataset, bbox: &BoundingBox, geom: &GeomConfig) -> Result<f64> {
    let ctx = VolumeContext::new(bbox, geom)?;
    let a = analyze(ind, data, &ctx, false)?;
    Ok(empty_volume_from(ind, &a.report))
}

/// Objective values together with the training accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: ObjectiveVector,
    pub accuracy: f64,
}

/// Compute the objectives in `set` for `ind`. Shared intermediates are computed
/// once; volumes and hulls only when some objective needs them.
pub fn evaluate_in(
    ind: &Individual,
    data: &Dataset,
    set: &ObjectiveSet,
    ctx: &VolumeContext,
) -> Result<Evaluation> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let need_volumes = set.ids().iter().any(|id| id.needs_volumes());
    let need_hulls = set.ids().iter().any(|id| id.needs_hulls());
    let dim = ctx.bbox.dim();

    let (parts, report) = if need_volumes {
        let a = analyze(ind, data, ctx, need_hulls)?;
        (a.parts, Some(a.report))
    } else {
        (geometry::assign_points(&data.points, &ind.sites)?, None)
    };
    let counts = confusion_from_parts(ind, data, &parts);

    let values = set
        .ids()
        .iter()
        .map(|id| {
            let v = match id {
                ObjectiveId::Accuracy => counts.accuracy(),
                ObjectiveId::Recall => counts.recall(),
                ObjectiveId::Specificity => counts.specificity(),
                ObjectiveId::Compactness => compactness_from(report.as_ref().unwrap(), dim),
                ObjectiveId::MultCompactness => mult_compactness_from(report.as_ref().unwrap(), dim),
                ObjectiveId::EmptyVolume => empty_volume_from(ind, report.as_ref().unwrap()),
            };
            finite_or_zero(v)
        })
        .collect();
    Ok(Evaluation {
        objectives: ObjectiveVector(values),
        accuracy: counts.accuracy(),
    })
}

/// Evaluate and cache the result on the individual, stamped with `generation`.
pub fn evaluate(
    ind: &mut Individual,
    data: &Dataset,
    set: &ObjectiveSet,
    bbox: &BoundingBox,
    geom: &GeomConfig,
    generation: u64,
) -> Result<ObjectiveVector> {
    let ctx = VolumeContext::new(bbox, geom)?;
    let e = evaluate_in(ind, data, set, &ctx)?;
    ind.objectives = Some(e.objectives.clone());
    ind.accuracy = Some(e.accuracy);
    ind.eval_stamp = Some(generation);
    Ok(e.objectives)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate, GeneratorKind, GeneratorSpec};
    use crate::genotype::{random_individual, Site};

    fn site(c: &[f64], label: Label) -> Site {
        Site {
            coords: c.to_vec(),
            sigmas: vec![0.1; c.len()],
            label,
        }
    }

    fn data(points: Vec<Vec<f64>>, label: Label) -> Dataset {
        let n = points.len();
        Dataset::new(points, vec![label; n], "t").unwrap()
    }

    #[test]
    fn confusion_all_anomaly() {
        let ind = Individual::new(vec![site(&[0.0, 0.0], Label::Anomaly)]);
        let d = data(vec![vec![1.0, 1.0], vec![2.0, 0.0], vec![0.3, 0.3]], Label::Anomaly);
        let c = confusion(&ind, &d).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 3, fp: 0, tn: 0, fn_: 0 });
        assert_eq!(c.accuracy(), 1.0);
        let empty = data(vec![], Label::Normal);
        assert!(matches!(confusion(&ind, &empty), Err(Error::EmptyDataset)));
    }

    #[test]
    fn confusion_matches_per_point_loop() {
        let spec = GeneratorSpec::new(GeneratorKind::HalfKernel, 300, 0.05, 4);
        let d = generate(&spec).unwrap();
        let b = d.bounding_box().unwrap();
        let ind = random_individual(2, 30, 30, &b, 9).unwrap();
        let mut oracle = ConfusionCounts::default();
        for (p, l) in d.iter() {
            oracle.record(ind.classify(p).unwrap(), l);
        }
        assert_eq!(confusion(&ind, &d).unwrap(), oracle);
        assert_eq!(oracle.total(), 300);
    }

    #[test]
    fn metric_arithmetic() {
        let c = ConfusionCounts { tp: 5, fp: 0, tn: 0, fn_: 0 };
        assert_eq!(metric(&c, Metric::Recall), 1.0);
        assert_eq!(metric(&c, Metric::Specificity), 0.0);
        assert!(metric_is_degenerate(&c, Metric::Specificity));
        let c = ConfusionCounts { tp: 0, fp: 5, tn: 0, fn_: 5 };
        assert_eq!(metric(&c, Metric::Accuracy), 0.0);
        let c = ConfusionCounts { tp: 30, fp: 10, tn: 50, fn_: 10 };
        assert_eq!(c.accuracy(), 0.8);
        assert_eq!(c.recall(), 0.75);
        assert_eq!(c.specificity(), 50.0 / 60.0);
    }

    #[test]
    fn sparse_cells_contribute_nothing() {
        // two points per cell in 2-D: |D_i| <= n everywhere
        let b = BoundingBox::unit(2);
        let ind = Individual::new(vec![site(&[0.25, 0.5], Label::Normal), site(&[0.75, 0.5], Label::Anomaly)]);
        let d = data(
            vec![vec![0.1, 0.1], vec![0.2, 0.9], vec![0.8, 0.1], vec![0.9, 0.9]],
            Label::Normal,
        );
        let g = GeomConfig::default();
        assert_eq!(compactness(&ind, &d, &b, &g).unwrap(), 0.0);
        assert_eq!(mult_compactness(&ind, &d, &b, &g).unwrap(), 0.0);
    }

    #[test]
    fn full_box_hull_gives_unit_compactness() {
        let b = BoundingBox::unit(2);
        let ind = Individual::new(vec![site(&[0.5, 0.5], Label::Normal)]);
        let d = data(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            Label::Normal,
        );
        let g = GeomConfig::default();
        assert_eq!(compactness(&ind, &d, &b, &g).unwrap(), 1.0);
        // |D| - n = 2
        assert_eq!(mult_compactness(&ind, &d, &b, &g).unwrap(), 2.0);
    }

    #[test]
    fn mult_weight_is_one_just_above_the_guard() {
        let b = BoundingBox::unit(2);
        let ind = Individual::new(vec![site(&[0.5, 0.5], Label::Normal)]);
        let d = data(vec![vec![0.1, 0.1], vec![0.9, 0.1], vec![0.5, 0.9]], Label::Normal);
        let g = GeomConfig::default();
        let c = compactness(&ind, &d, &b, &g).unwrap();
        assert!((c - 0.32).abs() < 1e-12);
        assert_eq!(mult_compactness(&ind, &d, &b, &g).unwrap(), c);
    }

    #[test]
    fn empty_volume_terms() {
        let b = BoundingBox::unit(2);
        let g = GeomConfig::default();
        let ind = Individual::new(vec![site(&[0.25, 0.5], Label::Normal), site(&[0.75, 0.5], Label::Anomaly)]);
        let d = data(vec![vec![0.1, 0.1]], Label::Normal);
        // empty anomaly cell: the whole half counts
        assert!((empty_volume(&ind, &d, &b, &g).unwrap() - 0.5).abs() < 1e-12);
        let normal_only = Individual::new(vec![site(&[0.25, 0.5], Label::Normal)]);
        assert_eq!(empty_volume(&normal_only, &d, &b, &g).unwrap(), 0.0);

        let report = VolumeReport {
            cell_volumes: vec![0.3],
            hull_volumes: vec![0.0],
            counts: vec![4],
            samples_used: 0,
        };
        let one = Individual::new(vec![site(&[0.0, 0.0], Label::Anomaly)]);
        let ev = empty_volume_from(&one, &report);
        assert!((ev - 0.3 / (1.0 + 2.0 * 5f64.ln())).abs() < 1e-15);
        assert!((ev - 0.07111).abs() < 1e-5);
    }

    #[test]
    fn objective_sets() {
        let s: ObjectiveSet = "a/m/t".parse().unwrap();
        assert_eq!(
            s.ids(),
            &[ObjectiveId::Accuracy, ObjectiveId::MultCompactness, ObjectiveId::EmptyVolume]
        );
        assert_eq!(s.to_string(), "a/m/t");
        assert!("a/a".parse::<ObjectiveSet>().is_err());
        assert!("".parse::<ObjectiveSet>().is_err());
        assert!("a/x".parse::<ObjectiveSet>().is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), "\"a/m/t\"");
    }

    #[test]
    fn evaluate_composes_and_caches() {
        let spec = GeneratorSpec::new(GeneratorKind::TwoSpiral, 200, 0.02, 1);
        let d = generate(&spec).unwrap();
        let b = d.bounding_box().unwrap();
        let g = GeomConfig::default();
        let mut ind = random_individual(2, 20, 40, &b, 3).unwrap();
        let acc_only: ObjectiveSet = "a".parse().unwrap();
        let v = evaluate(&mut ind, &d, &acc_only, &b, &g, 0).unwrap();
        assert_eq!(v.0, vec![confusion(&ind, &d).unwrap().accuracy()]);

        let amt = ObjectiveSet::amt();
        let v = evaluate(&mut ind, &d, &amt, &b, &g, 7).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.0[1], mult_compactness(&ind, &d, &b, &g).unwrap());
        assert_eq!(v.0[2], empty_volume(&ind, &d, &b, &g).unwrap());
        assert_eq!(ind.eval_stamp, Some(7));
        assert_eq!(ind.objectives.as_ref(), Some(&v));
        let again = evaluate(&mut ind.clone(), &d, &amt, &b, &g, 8).unwrap();
        assert_eq!(again, v);
    }

    #[test]
    fn monte_carlo_path_in_3d_is_deterministic() {
        let b = BoundingBox::unit(3);
        let g = GeomConfig {
            n_samples: 4000,
            seed: 5,
            exact_2d: true,
        };
        let ind = random_individual(3, 5, 5, &b, 2).unwrap();
        let mut rng = crate::rng::seeded(3);
        let pts: Vec<Vec<f64>> = (0..60).map(|_| b.sample(&mut rng)).collect();
        let d = data(pts, Label::Normal);
        let set = ObjectiveSet::act();
        let ctx = VolumeContext::new(&b, &g).unwrap();
        assert!(!ctx.is_exact());
        let e1 = evaluate_in(&ind, &d, &set, &ctx).unwrap();
        let e2 = evaluate_in(&ind, &d, &set, &VolumeContext::new(&b, &g).unwrap()).unwrap();
        assert_eq!(e1, e2);
        assert!(e1.objectives.0.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn compactness_ignores_labels() {
        let spec = GeneratorSpec::new(GeneratorKind::Corners, 200, 0.02, 1);
        let d = generate(&spec).unwrap();
        let b = d.bounding_box().unwrap();
        let g = GeomConfig::default();
        let ind = random_individual(2, 25, 25, &b, 4).unwrap();
        let mut flipped = ind.clone();
        for s in &mut flipped.sites {
            s.label = s.label.flipped();
        }
        assert_eq!(compactness(&ind, &d, &b, &g).unwrap(), compactness(&flipped, &d, &b, &g).unwrap());
        assert_eq!(
            mult_compactness(&ind, &d, &b, &g).unwrap(),
            mult_compactness(&flipped, &d, &b, &g).unwrap()
        );
    }
}
