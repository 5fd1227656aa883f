use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{nb_train, nsa_train_with, NaiveBayesModel, NsaConfig, NsaModel};
use crate::datasets::{generate, load_csv, Dataset, GeneratorSpec};
use crate::error::{Error, Result};
use crate::evolution::{evolve, Committee, EvolutionConfig};
use crate::genotype::Label;

/// A detector family and its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmConfig {
    Voreal(EvolutionConfig),
    Nsa(NsaConfig),
    NaiveBayes,
}

/// An algorithm entry of an experiment; `name` defaults to
/// [`AlgorithmSpec::default_name`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub config: AlgorithmConfig,
}

impl AlgorithmSpec {
    pub fn new(config: AlgorithmConfig) -> Self {
        Self { name: None, config }
    }

    pub fn voreal(cfg: EvolutionConfig) -> Self {
        Self::new(AlgorithmConfig::Voreal(cfg))
    }

    pub fn default_name(&self) -> String {
        match &self.config {
            AlgorithmConfig::Voreal(c) => format!("voreal({})", c.objective_set),
            AlgorithmConfig::Nsa(_) => "nsa".into(),
            AlgorithmConfig::NaiveBayes => "naive_bayes".into(),
        }
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.default_name())
    }

    /// Train on `train`; `seed` replaces any seed in the settings.
    pub fn train(&self, train: &Dataset, seed: u64) -> Result<TrainedModel> {
        match &self.config {
            AlgorithmConfig::Voreal(c) => {
                let cfg = EvolutionConfig { seed, ..c.clone() };
                let bbox = train.bounding_box()?;
                Ok(TrainedModel::Committee(evolve(train, &cfg, &bbox)?.committee))
            }
            AlgorithmConfig::Nsa(c) => Ok(TrainedModel::Nsa(nsa_train_with(train, c, seed)?)),
            AlgorithmConfig::NaiveBayes => Ok(TrainedModel::NaiveBayes(nb_train(train)?)),
        }
    }
}

/// Any trained detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TrainedModel {
    Committee(Committee),
    Nsa(NsaModel),
    NaiveBayes(NaiveBayesModel),
}

impl TrainedModel {
    pub fn classify(&self, point: &[f64]) -> Result<Label> {
        match self {
            TrainedModel::Committee(c) => c.classify(point),
            TrainedModel::Nsa(m) => Ok(m.classify(point)),
            TrainedModel::NaiveBayes(m) => Ok(m.classify(point)),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

/// A generator given either as `"kind:n=..,noise=..,seed=.."` or as an object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetEntry {
    Short(String),
    Full(GeneratorSpec),
}

impl DatasetEntry {
    pub fn spec(&self) -> Result<GeneratorSpec> {
        match self {
            DatasetEntry::Short(s) => s.parse(),
            DatasetEntry::Full(g) => Ok(g.clone()),
        }
    }
}

impl From<GeneratorSpec> for DatasetEntry {
    fn from(g: GeneratorSpec) -> Self {
        DatasetEntry::Full(g)
    }
}

fn default_runs() -> usize {
    50
}
fn default_alpha() -> f64 {
    0.05
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_true() -> bool {
    true
}

/// Test-set construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TestSetConfig {
    /// Injected anomalies; defaults to the generator's anomaly count.
    #[serde(default)]
    pub injected: Option<usize>,
    /// Separation from training points; defaults to 5 % of the training box
    /// diagonal.
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetEntry>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub test: TestSetConfig,
    /// Keep each run's model and test set under `runs/`.
    #[serde(default = "default_true")]
    pub save_models: bool,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::param("runs must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        let names = self.dataset_names()?;
        for (k, n) in names.iter().enumerate() {
            if names[..k].contains(n) {
                return Err(Error::param(format!("dataset `{n}` listed twice")));
            }
        }
        let algos = self.algorithm_names();
        for (k, n) in algos.iter().enumerate() {
            if algos[..k].contains(n) {
                return Err(Error::param(format!("algorithm `{n}` listed twice; give one a name")));
            }
        }
        for a in &self.algorithms {
            if let AlgorithmConfig::Voreal(c) = &a.config {
                c.validate()?;
            }
        }
        Ok(())
    }

    pub fn specs(&self) -> Result<Vec<GeneratorSpec>> {
        self.datasets.iter().map(DatasetEntry::spec).collect()
    }

    pub fn dataset_names(&self) -> Result<Vec<String>> {
        Ok(self.specs()?.iter().map(|s| s.kind.name().to_string()).collect())
    }

    pub fn algorithm_names(&self) -> Vec<String> {
        self.algorithms.iter().map(AlgorithmSpec::name).collect()
    }

    /// Number of (dataset, algorithm, run) cells.
    pub fn n_cells(&self) -> usize {
        self.datasets.len() * self.algorithms.len() * self.runs
    }
}

/// Where `train` reads its data from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv(PathBuf),
    Generator(DatasetEntry),
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataSource::Csv(p) => load_csv(p),
            DataSource::Generator(g) => generate(&g.spec()?),
        }
    }
}

/// Input of the `train` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub data: DataSource,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub seed: u64,
}

impl TrainConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ObjectiveSet;

    #[test]
    fn parses_a_mixed_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "datasets": ["two-spiral:n=200", {"kind": "corners", "n_points": 100}],
                "algorithms": [
                    {"kind": "voreal", "objective_set": "a/m/t", "pop_size": 10, "generations": 3},
                    {"kind": "voreal", "objective_set": "a/c"},
                    {"kind": "nsa", "max_detectors": 50},
                    {"kind": "naive_bayes", "name": "nb"}
                ],
                "runs": 3
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.algorithm_names(), vec!["voreal(a/m/t)", "voreal(a/c)", "nsa", "nb"]);
        assert_eq!(cfg.dataset_names().unwrap(), vec!["two-spiral", "corners"]);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.n_cells(), 24);
        match &cfg.algorithms[0].config {
            AlgorithmConfig::Voreal(c) => {
                assert_eq!(c.pop_size, 10);
                assert_eq!(c.objective_set, ObjectiveSet::amt());
            }
            other => panic!("{other:?}"),
        }
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"datasets": ["corners"], "algorithms": [{"kind": "nsa"}], "runs": 0}"#,
            r#"{"datasets": ["corners"], "algorithms": [{"kind": "nsa"}], "alpha": 1.0}"#,
            r#"{"datasets": ["corners", "corners"], "algorithms": [{"kind": "nsa"}]}"#,
            r#"{"datasets": ["corners"], "algorithms": [{"kind": "nsa"}, {"kind": "nsa"}]}"#,
            r#"{"datasets": ["nowhere"], "algorithms": [{"kind": "nsa"}]}"#,
            r#"{"datasets": ["corners"], "algorithms": [{"kind": "svm"}]}"#,
        ];
        for b in bad {
            assert!(ExperimentConfig::from_json(b).is_err(), "{b}");
        }
    }

    #[test]
    fn trained_model_json_round_trip() {
        let d = generate(&"half-kernel:n=80".parse().unwrap()).unwrap();
        let m = AlgorithmSpec::new(AlgorithmConfig::NaiveBayes).train(&d, 0).unwrap();
        let back = TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        for p in &d.points {
            assert_eq!(back.classify(p).unwrap(), m.classify(p).unwrap());
        }
    }
}
