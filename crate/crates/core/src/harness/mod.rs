//! Repeated seeded experiments, significance testing and result files.

mod config;
mod export;
mod runner;
mod stats;

pub use config::{
    AlgorithmConfig, AlgorithmSpec, DataSource, DatasetEntry, ExperimentConfig, TestSetConfig, TrainConfig,
    TrainedModel,
};
pub use export::{
    export, quantile, read_records, read_stats, stats_file, summarize, win_counts, write_records, write_stats,
    write_timings, write_wins, SignTable, SummaryEntry, WinCount, RECORDS_FILE, SUMMARY_FILE, TIMINGS_FILE,
    WINS_FILE,
};
pub use runner::{
    data_seed, run_data, run_dir, run_experiment, run_experiment_with, run_seed, score, ExperimentOutcome,
    RunOptions, RunRecord, Timing, JOURNAL_FILE, STATUS_OK,
};
pub use stats::{average_ranks, compare, friedman, holm, rank_sum, ComparisonMatrix, Sign};

use crate::error::Result;
use crate::objectives::Metric;

/// Run, compare on every metric and export: the `bench` pipeline.
pub fn bench(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutcome> {
    let outcome = run_experiment_with(cfg, opts)?;
    let mut matrices = Vec::new();
    if cfg.algorithms.len() >= 2 && outcome.pending == 0 {
        for metric in Metric::ALL {
            matrices.extend(compare(&outcome.records, metric, cfg.alpha)?);
        }
    }
    export(&outcome.records, &matrices, &cfg.output_dir)?;
    write_timings(&outcome.timings, &cfg.output_dir.join(TIMINGS_FILE))?;
    Ok(outcome)
}
