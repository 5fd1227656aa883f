use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use voreal::datasets::{default_delta, generate, inject_test_anomalies, load_csv, save_csv, GeneratorSpec};
use voreal::error::{Error, Result};
use voreal::harness::{self, compare, read_records, ExperimentConfig, RunOptions, TrainConfig, TrainedModel};
use voreal::objectives::{ConfusionCounts, Metric};

#[derive(Parser)]
#[command(name = "voreal", version, about = "Evolved Voronoi anomaly detectors and their benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset, e.g. `two-spiral:n=400,noise=0.02,seed=1`.
    GenData {
        spec: String,
        #[arg(short, long)]
        out: PathBuf,
        /// Append this many anomalies drawn from empty regions of the set.
        #[arg(long)]
        inject: Option<usize>,
        /// Minimum distance of injected points to the data.
        #[arg(long, requires = "inject")]
        delta: Option<f64>,
    },
    /// Train one detector and write it as JSON.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label every point of a CSV file with a trained model.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Run an experiment and write records, summaries and significance tables.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run independent cells in parallel.
        #[arg(long)]
        parallel: bool,
        /// Stop after this many new cells; a later call resumes.
        #[arg(long)]
        stop_after: Option<usize>,
    },
    /// Significance matrices from a records file.
    Stats {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "accuracy")]
        metric: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData {
            spec,
            out,
            inject,
            delta,
        } => {
            let spec: GeneratorSpec = spec.parse()?;
            let mut data = generate(&spec)?;
            if let Some(n) = inject {
                let delta = match delta {
                    Some(d) => d,
                    None => default_delta(&data)?,
                };
                data = inject_test_anomalies(&data, n, delta, spec.seed)?.test;
            }
            save_csv(&data, &out)?;
            eprintln!("wrote {} points to {}", data.len(), out.display());
        }
        Command::Train { config, out } => {
            let cfg = TrainConfig::load(&config)?;
            let train = cfg.data.load()?;
            let model = cfg.algorithm.train(&train, cfg.seed)?;
            model.save(&out)?;
            eprintln!("trained {} on {} points", cfg.algorithm.name(), train.len());
        }
        Command::Classify { model, data } => {
            let model = TrainedModel::load(&model)?;
            let data = load_csv(&data)?;
            let mut counts = ConfusionCounts::default();
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            let w = |e| Error::io("stdout", e);
            writeln!(out, "index,label,predicted").map_err(w)?;
            for (k, (p, label)) in data.iter().enumerate() {
                let pred = model.classify(p)?;
                counts.record(pred, label);
                writeln!(out, "{k},{label},{pred}").map_err(w)?;
            }
            eprintln!(
                "accuracy {:.4} recall {:.4} specificity {:.4}",
                counts.accuracy(),
                counts.recall(),
                counts.specificity()
            );
        }
        Command::Bench {
            config,
            out,
            parallel,
            stop_after,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            let outcome = harness::bench(&cfg, &RunOptions { stop_after, parallel })?;
            let failed = outcome.records.iter().filter(|r| !r.is_ok()).count();
            eprintln!(
                "{} records ({} failed, {} cells pending) in {}",
                outcome.records.len(),
                failed,
                outcome.pending,
                cfg.output_dir.display()
            );
        }
        Command::Stats {
            records,
            metric,
            alpha,
        } => {
            let metric: Metric = metric.parse()?;
            let recs = read_records(&records)?;
            for m in compare(&recs, metric, alpha)? {
                println!("{} ({metric}), Friedman p = {:.4e}", m.dataset, m.friedman_p);
                let width = m.algorithms.iter().map(String::len).max().unwrap_or(0);
                for (i, a) in m.algorithms.iter().enumerate() {
                    let cells: Vec<&str> = m.signs[i].iter().map(|s| s.symbol()).collect();
                    println!("  {a:width$}  {}", cells.join(" "));
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
