//! Labeled Voronoi diagrams as genomes and classifiers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BoundingBox};
use crate::objectives::ObjectiveVector;
use crate::rng;

/// Class of a point or a cell. Anomaly is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Normal,
    Anomaly,
}

impl Label {
    pub fn flipped(self) -> Self {
        match self {
            Label::Normal => Label::Anomaly,
            Label::Anomaly => Label::Normal,
        }
    }

    pub fn is_anomaly(self) -> bool {
        self == Label::Anomaly
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Normal => "normal",
            Label::Anomaly => "anomaly",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(Label::Normal),
            "anomaly" => Ok(Label::Anomaly),
            other => Err(Error::param(format!("unknown label `{other}`"))),
        }
    }
}

/// One Voronoi site: a position, its self-adaptive step sizes and the label of
/// its cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub coords: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub label: Label,
}

impl AsRef<[f64]> for Site {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

impl Site {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Allowed number of sites per individual, `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteBounds {
    pub min: usize,
    pub max: usize,
}

impl SiteBounds {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min < 1 || min > max {
            return Err(Error::param(format!(
                "site bounds need 1 <= p_min <= p_max, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, n: usize) -> bool {
        self.min <= n && n <= self.max
    }
}

impl Default for SiteBounds {
    fn default() -> Self {
        Self { min: 20, max: 100 }
    }
}

/// Step-size limits for one coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBounds {
    pub min: f64,
    pub max: f64,
}

impl SigmaBounds {
    /// `[1e-6, 1] * extent` of axis `d`.
    pub fn for_axis(bbox: &BoundingBox, d: usize) -> Self {
        let extent = bbox.extent(d);
        Self {
            min: 1e-6 * extent,
            max: extent,
        }
    }

    pub fn clamp(&self, sigma: f64) -> f64 {
        sigma.clamp(self.min, self.max)
    }
}

/// Initial step size of a new site on axis `d`.
pub fn initial_sigma(bbox: &BoundingBox, d: usize) -> f64 {
    0.1 * bbox.extent(d)
}

/// A site at a uniform position in `bbox` with a uniform label.
pub fn random_site<R: Rng + ?Sized>(bbox: &BoundingBox, rng: &mut R) -> Site {
    let coords = bbox.sample(rng);
    let sigmas = (0..bbox.dim()).map(|d| initial_sigma(bbox, d)).collect();
    let label = if rng.random::<bool>() {
        Label::Anomaly
    } else {
        Label::Normal
    };
    Site {
        coords,
        sigmas,
        label,
    }
}

/// A candidate solution: a variable-length list of sites plus cached
/// evaluation results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub sites: Vec<Site>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectives: Option<ObjectiveVector>,
    /// Training accuracy, kept even when accuracy is not an objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_stamp: Option<u64>,
}

impl Individual {
    pub fn new(sites: Vec<Site>) -> Self {
        Self {
            sites,
            objectives: None,
            accuracy: None,
            eval_stamp: None,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.sites.first().map(Site::dim)
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    pub fn clear_cache(&mut self) {
        self.objectives = None;
        self.accuracy = None;
        self.eval_stamp = None;
    }

    /// Label of the cell containing `point`.
    pub fn classify(&self, point: &[f64]) -> Result<Label> {
        classify(self, point)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A random diagram with a uniform site count in `[p_min, p_max]`.
pub fn random_individual(
    dim: usize,
    p_min: usize,
    p_max: usize,
    bbox: &BoundingBox,
    seed: u64,
) -> Result<Individual> {
    let bounds = SiteBounds::new(p_min, p_max)?;
    geometry::check_dim(dim, bbox.dim())?;
    Ok(random_individual_with(bounds, bbox, &mut rng::seeded(seed)))
}

pub fn random_individual_with<R: Rng + ?Sized>(
    bounds: SiteBounds,
    bbox: &BoundingBox,
    rng: &mut R,
) -> Individual {
    let p = rng.random_range(bounds.min..=bounds.max);
    Individual::new((0..p).map(|_| random_site(bbox, rng)).collect())
}

pub fn classify(ind: &Individual, point: &[f64]) -> Result<Label> {
    let i = geometry::nearest_site(point, &ind.sites)?;
    Ok(ind.sites[i].label)
}
