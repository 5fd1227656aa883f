use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{default_delta, generate, inject_test_anomalies, save_csv, Dataset, GeneratorSpec};
use crate::error::{Error, Result};
use crate::genotype::Label;
use crate::objectives::ConfusionCounts;
use crate::rng::derive_seed;

use super::config::{AlgorithmSpec, ExperimentConfig, TrainedModel};

pub const STATUS_OK: &str = "ok";

/// Test-set outcome of one (dataset, algorithm, run) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub algorithm: String,
    pub run: usize,
    pub seed: u64,
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    /// Recall on the injected anomalies only.
    pub injected_recall: Option<f64>,
    /// `ok`, or `error: <message>`.
    pub status: String,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    pub fn key(&self) -> (String, String, usize) {
        (self.dataset.clone(), self.algorithm.clone(), self.run)
    }

    pub fn metric(&self, m: crate::objectives::Metric) -> Option<f64> {
        use crate::objectives::Metric;
        match m {
            Metric::Accuracy => self.accuracy,
            Metric::Recall => self.recall,
            Metric::Specificity => self.specificity,
        }
    }
}

/// Journal row: a record plus its wall time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct JournalRow {
    dataset: String,
    algorithm: String,
    run: usize,
    seed: u64,
    accuracy: Option<f64>,
    recall: Option<f64>,
    specificity: Option<f64>,
    injected_recall: Option<f64>,
    status: String,
    wall_seconds: f64,
}

impl JournalRow {
    fn record(&self) -> RunRecord {
        RunRecord {
            dataset: self.dataset.clone(),
            algorithm: self.algorithm.clone(),
            run: self.run,
            seed: self.seed,
            accuracy: self.accuracy,
            recall: self.recall,
            specificity: self.specificity,
            injected_recall: self.injected_recall,
            status: self.status.clone(),
        }
    }
}

/// Wall time of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub dataset: String,
    pub algorithm: String,
    pub run: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Stop after this many newly completed cells, leaving the rest for a
    /// later resume.
    pub stop_after: Option<usize>,
    /// Run cells in parallel.
    pub parallel: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Canonically ordered records of every completed cell.
    pub records: Vec<RunRecord>,
    pub timings: Vec<Timing>,
    /// Cells still missing.
    pub pending: usize,
}

pub const JOURNAL_FILE: &str = "journal.csv";

/// Seed of an algorithm's training in one run.
pub fn run_seed(base: u64, dataset: &str, algorithm: &str, run: usize) -> u64 {
    derive_seed(base, &[dataset, algorithm, &run.to_string()])
}

/// Seed of the data of one run, shared by every algorithm so that runs pair
/// up across algorithms.
pub fn data_seed(base: u64, dataset: &str, spec_seed: u64, run: usize) -> u64 {
    derive_seed(base, &[dataset, &spec_seed.to_string(), "data", &run.to_string()])
}

/// Training and test sets of one run.
pub fn run_data(cfg: &ExperimentConfig, spec: &GeneratorSpec, run: usize) -> Result<(Dataset, Dataset)> {
    let name = spec.kind.name();
    let seed = data_seed(cfg.base_seed, name, spec.seed, run);
    let train = generate(&spec.with_seed(seed))?;
    let delta = match cfg.test.delta {
        Some(d) => d,
        None => default_delta(&train)?,
    };
    let n_anom = cfg.test.injected.unwrap_or_else(|| spec.n_anomalies());
    let test = inject_test_anomalies(&train, n_anom, delta, derive_seed(seed, &["test"]))?.test;
    Ok((train, test))
}

/// Test metrics of a trained model.
pub fn score(model: &TrainedModel, test: &Dataset) -> Result<(ConfusionCounts, Option<f64>)> {
    let mut counts = ConfusionCounts::default();
    let mut injected_hits = 0usize;
    let injected = test.injected_range();
    for (k, (p, label)) in test.iter().enumerate() {
        let pred = model.classify(p)?;
        counts.record(pred, label);
        if injected.contains(&k) && pred == Label::Anomaly {
            injected_hits += 1;
        }
    }
    let injected_recall = (!injected.is_empty()).then(|| injected_hits as f64 / injected.len() as f64);
    Ok((counts, injected_recall))
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Directory holding the persisted model and test set of a cell.
pub fn run_dir(output: &Path, dataset: &str, algorithm: &str, run: usize) -> PathBuf {
    output
        .join("runs")
        .join(slug(dataset))
        .join(slug(algorithm))
        .join(format!("run_{run:03}"))
}

struct Cell<'a> {
    run: usize,
    spec: &'a GeneratorSpec,
    algo: &'a AlgorithmSpec,
    dataset: String,
    algorithm: String,
}

fn execute(cfg: &ExperimentConfig, cell: &Cell) -> JournalRow {
    let seed = run_seed(cfg.base_seed, &cell.dataset, &cell.algorithm, cell.run);
    let start = Instant::now();
    let outcome = (|| -> Result<(ConfusionCounts, Option<f64>)> {
        let (train, test) = run_data(cfg, cell.spec, cell.run)?;
        let model = cell.algo.train(&train, seed)?;
        let scored = score(&model, &test)?;
        if cfg.save_models {
            let dir = run_dir(&cfg.output_dir, &cell.dataset, &cell.algorithm, cell.run);
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            model.save(&dir.join("model.json"))?;
            save_csv(&test, &dir.join("test.csv"))?;
        }
        Ok(scored)
    })();
    let wall_seconds = start.elapsed().as_secs_f64();
    let mut row = JournalRow {
        dataset: cell.dataset.clone(),
        algorithm: cell.algorithm.clone(),
        run: cell.run,
        seed,
        accuracy: None,
        recall: None,
        specificity: None,
        injected_recall: None,
        status: STATUS_OK.into(),
        wall_seconds,
    };
    match outcome {
        Ok((c, inj)) => {
            row.accuracy = Some(c.accuracy());
            row.recall = Some(c.recall());
            row.specificity = Some(c.specificity());
            row.injected_recall = inj;
        }
        Err(e) => {
            warn!("{} / {} / run {}: {e}", cell.dataset, cell.algorithm, cell.run);
            row.status = format!("error: {e}");
        }
    }
    row
}

fn read_journal(path: &Path) -> Result<Vec<JournalRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in r.deserialize() {
        match row {
            Ok(row) => rows.push(row),
            // a torn final line from an interrupted write
            Err(e) => warn!("skipping unreadable journal row in {}: {e}", path.display()),
        }
    }
    Ok(rows)
}

/// Run every missing (dataset, algorithm, run) cell of `cfg`, appending each
/// result to the journal in `cfg.output_dir` as it completes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    Ok(run_experiment_with(cfg, &RunOptions::default())?.records)
}

pub fn run_experiment_with(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let journal_path = out.join(JOURNAL_FILE);

    let specs = cfg.specs()?;
    let d_names = cfg.dataset_names()?;
    let a_names = cfg.algorithm_names();

    let mut done_rows = read_journal(&journal_path)?;
    let done: HashSet<(String, String, usize)> =
        done_rows.iter().map(|r| (r.dataset.clone(), r.algorithm.clone(), r.run)).collect();

    let mut cells = Vec::new();
    for (d, spec) in specs.iter().enumerate() {
        for (a, algo) in cfg.algorithms.iter().enumerate() {
            for run in 0..cfg.runs {
                if done.contains(&(d_names[d].clone(), a_names[a].clone(), run)) {
                    continue;
                }
                cells.push(Cell {
                    run,
                    spec,
                    algo,
                    dataset: d_names[d].clone(),
                    algorithm: a_names[a].clone(),
                });
            }
        }
    }
    let total_pending = cells.len();
    if let Some(n) = opts.stop_after {
        cells.truncate(n);
    }
    info!(
        "{} cells done, running {} of {} pending",
        done.len(),
        cells.len(),
        total_pending
    );

    let fresh = !journal_path.exists() || fs::metadata(&journal_path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&journal_path)
        .map_err(|e| Error::io(&journal_path, e))?;
    let writer = Mutex::new(csv::WriterBuilder::new().has_headers(fresh).from_writer(file));
    let emit = |row: &JournalRow| -> Result<()> {
        let mut w = writer.lock().expect("journal writer poisoned");
        w.serialize(row)?;
        w.flush().map_err(|e| Error::io(&journal_path, e))
    };

    let new_rows: Vec<JournalRow> = if opts.parallel {
        cells
            .par_iter()
            .map(|c| {
                let row = execute(cfg, c);
                emit(&row).map(|_| row)
            })
            .collect::<Result<_>>()?
    } else {
        cells
            .iter()
            .map(|c| {
                let row = execute(cfg, c);
                emit(&row).map(|_| row)
            })
            .collect::<Result<_>>()?
    };
    done_rows.extend(new_rows);

    // canonical order: config order of datasets and algorithms, then run
    let pos = |name: &str, list: &[String]| list.iter().position(|n| n == name).unwrap_or(usize::MAX);
    done_rows.retain(|r| pos(&r.dataset, &d_names) != usize::MAX && pos(&r.algorithm, &a_names) != usize::MAX && r.run < cfg.runs);
    done_rows.sort_by_key(|r| (pos(&r.dataset, &d_names), pos(&r.algorithm, &a_names), r.run));
    done_rows.dedup_by(|a, b| a.dataset == b.dataset && a.algorithm == b.algorithm && a.run == b.run);

    Ok(ExperimentOutcome {
        records: done_rows.iter().map(JournalRow::record).collect(),
        timings: done_rows
            .iter()
            .map(|r| Timing {
                dataset: r.dataset.clone(),
                algorithm: r.algorithm.clone(),
                run: r.run,
                wall_seconds: r.wall_seconds,
            })
            .collect(),
        pending: total_pending - cells.len(),
    })
}
