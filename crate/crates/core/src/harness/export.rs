use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Metric;

use super::runner::{RunRecord, Timing};
use super::stats::{ComparisonMatrix, Sign};

pub const RECORDS_FILE: &str = "records.csv";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const WINS_FILE: &str = "wins.csv";

pub fn stats_file(metric: Metric) -> String {
    format!("stats_{metric}.csv")
}

/// Type-7 sample quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Box-plot numbers of one (dataset, algorithm, metric) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub dataset: String,
    pub algorithm: String,
    pub metric: String,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

const SUMMARY_METRICS: [&str; 4] = ["accuracy", "recall", "specificity", "injected_recall"];

fn metric_value(r: &RunRecord, name: &str) -> Option<f64> {
    match name {
        "accuracy" => r.accuracy,
        "recall" => r.recall,
        "specificity" => r.specificity,
        "injected_recall" => r.injected_recall,
        _ => None,
    }
}

/// Per (dataset, algorithm, metric) quartiles over successful runs, in
/// first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryEntry> {
    let mut groups: Vec<(&str, &str)> = Vec::new();
    for r in records {
        if !groups.contains(&(r.dataset.as_str(), r.algorithm.as_str())) {
            groups.push((&r.dataset, &r.algorithm));
        }
    }
    let mut out = Vec::new();
    for (d, a) in groups {
        for m in SUMMARY_METRICS {
            let mut xs: Vec<f64> = records
                .iter()
                .filter(|r| r.dataset == d && r.algorithm == a && r.is_ok())
                .filter_map(|r| metric_value(r, m))
                .collect();
            if xs.is_empty() {
                continue;
            }
            xs.sort_by(f64::total_cmp);
            out.push(SummaryEntry {
                dataset: d.into(),
                algorithm: a.into(),
                metric: m.into(),
                n: xs.len(),
                min: xs[0],
                q1: quantile(&xs, 0.25),
                median: quantile(&xs, 0.5),
                q3: quantile(&xs, 0.75),
                max: xs[xs.len() - 1],
            });
        }
    }
    out
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn finish<W: std::io::Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_records(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record([
        "dataset",
        "algorithm",
        "run",
        "seed",
        "accuracy",
        "recall",
        "specificity",
        "injected_recall",
        "status",
    ])?;
    for r in records {
        w.serialize(r)?;
    }
    finish(w, path)
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::Reader::from_reader(File::open(path).map_err(|e| Error::io(path, e))?))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = open_csv(path)?;
    let mut out = Vec::new();
    for (k, row) in r.deserialize().enumerate() {
        out.push(row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: k + 2,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_timings(timings: &[Timing], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(["dataset", "algorithm", "run", "wall_seconds"])?;
    for t in timings {
        w.serialize(t)?;
    }
    finish(w, path)
}

/// Algorithm names across matrices, first-seen order.
fn algorithm_union(matrices: &[&ComparisonMatrix]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for m in matrices {
        for a in &m.algorithms {
            if !names.contains(a) {
                names.push(a.clone());
            }
        }
    }
    names
}

/// One row per (dataset, row algorithm): the Friedman p-value and the sign
/// against every column algorithm.
pub fn write_stats(matrices: &[ComparisonMatrix], metric: Metric, path: &Path) -> Result<()> {
    let ms: Vec<&ComparisonMatrix> = matrices.iter().filter(|m| m.metric == metric).collect();
    let names = algorithm_union(&ms);
    let mut w = csv::WriterBuilder::new().flexible(false).from_writer(create(path)?);
    let mut header = vec!["dataset".to_string(), "algorithm".into(), "friedman_p".into()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for m in ms {
        for (i, a) in m.algorithms.iter().enumerate() {
            let mut row = vec![m.dataset.clone(), a.clone(), m.friedman_p.to_string()];
            for col in &names {
                row.push(match m.algorithms.iter().position(|x| x == col) {
                    Some(j) => m.signs[i][j].symbol().to_string(),
                    None => String::new(),
                });
            }
            w.write_record(&row)?;
        }
    }
    finish(w, path)
}

/// Signs read back from a stats file: `(dataset, algorithms, signs)` per
/// dataset.
pub type SignTable = (String, Vec<String>, Vec<Vec<Sign>>);

pub fn read_stats(path: &Path) -> Result<Vec<SignTable>> {
    let mut r = open_csv(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let cols = &header[3..];
    let mut out: Vec<SignTable> = Vec::new();
    for (k, row) in r.records().enumerate() {
        let row = row?;
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: k + 2,
            message,
        };
        let dataset = row.get(0).ok_or_else(|| bad("missing dataset".into()))?.to_string();
        let algorithm = row.get(1).ok_or_else(|| bad("missing algorithm".into()))?.to_string();
        if out.last().map(|t| t.0 != dataset).unwrap_or(true) {
            out.push((dataset, Vec::new(), Vec::new()));
        }
        let table = out.last_mut().unwrap();
        table.1.push(algorithm);
        let mut signs = Vec::new();
        for (c, _) in cols.iter().enumerate() {
            let cell = row.get(3 + c).unwrap_or("");
            if !cell.is_empty() {
                signs.push(cell.parse().map_err(|e: Error| bad(e.to_string()))?);
            }
        }
        table.2.push(signs);
    }
    Ok(out)
}

/// Per (algorithm, dataset, metric) counts of `+`, `-` and `~` against the
/// other algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinCount {
    pub algorithm: String,
    pub dataset: String,
    pub metric: Metric,
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
}

pub fn win_counts(matrices: &[ComparisonMatrix]) -> Vec<WinCount> {
    let mut out = Vec::new();
    for m in matrices {
        for (i, a) in m.algorithms.iter().enumerate() {
            let others = (0..m.algorithms.len()).filter(|&j| j != i);
            let count = |s: Sign| others.clone().filter(|&j| m.signs[i][j] == s).count();
            out.push(WinCount {
                algorithm: a.clone(),
                dataset: m.dataset.clone(),
                metric: m.metric,
                wins: count(Sign::Better),
                losses: count(Sign::Worse),
                ties: count(Sign::Same),
            });
        }
    }
    out
}

pub fn write_wins(matrices: &[ComparisonMatrix], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(["algorithm", "dataset", "metric", "wins", "losses", "ties"])?;
    for c in win_counts(matrices) {
        w.serialize(c)?;
    }
    finish(w, path)
}

/// Write `records.csv`, `summary.json`, one `stats_<metric>.csv` per metric
/// and `wins.csv` into `dir`.
pub fn export(records: &[RunRecord], matrices: &[ComparisonMatrix], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_records(records, &dir.join(RECORDS_FILE))?;
    let summary = serde_json::to_string_pretty(&summarize(records))?;
    let p = dir.join(SUMMARY_FILE);
    fs::write(&p, summary + "\n").map_err(|e| Error::io(&p, e))?;
    for metric in Metric::ALL {
        write_stats(matrices, metric, &dir.join(stats_file(metric)))?;
    }
    write_wins(matrices, &dir.join(WINS_FILE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::compare;

    fn rec(d: &str, a: &str, run: usize, acc: f64) -> RunRecord {
        RunRecord {
            dataset: d.into(),
            algorithm: a.into(),
            run,
            seed: run as u64,
            accuracy: Some(acc),
            recall: Some(acc / 2.0),
            specificity: Some(1.0 - acc),
            injected_recall: Some(0.25),
            status: "ok".into(),
        }
    }

    #[test]
    fn type7_quantiles() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 0.25), 1.75);
        assert_eq!(quantile(&xs, 0.75), 3.25);
        assert_eq!(quantile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn empty_export_writes_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        export(&[], &[], dir.path()).unwrap();
        let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(
            read(RECORDS_FILE),
            "dataset,algorithm,run,seed,accuracy,recall,specificity,injected_recall,status\n"
        );
        assert_eq!(read("stats_accuracy.csv"), "dataset,algorithm,friedman_p\n");
        assert_eq!(read(WINS_FILE), "algorithm,dataset,metric,wins,losses,ties\n");
        assert_eq!(read(SUMMARY_FILE).trim(), "[]");
        assert!(read_records(&dir.path().join(RECORDS_FILE)).unwrap().is_empty());
    }

    #[test]
    fn records_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mut recs = vec![rec("d", "a", 0, 0.1), rec("d", "b", 0, 0.3)];
        recs.push(RunRecord {
            accuracy: None,
            recall: None,
            specificity: None,
            injected_recall: None,
            status: "error: boom, twice".into(),
            ..rec("d", "c", 0, 0.0)
        });
        let p = dir.path().join("r.csv");
        write_records(&recs, &p).unwrap();
        assert_eq!(read_records(&p).unwrap(), recs);
    }

    #[test]
    fn summary_matches_recomputation() {
        let recs: Vec<RunRecord> = (0..9).map(|i| rec("d", "a", i, i as f64 / 10.0)).collect();
        let s = summarize(&recs);
        let acc = s.iter().find(|e| e.metric == "accuracy").unwrap();
        assert_eq!(acc.n, 9);
        assert_eq!(acc.median, 0.4);
        assert_eq!(acc.q1, 0.2);
        assert_eq!(acc.q3, 0.6);
        assert_eq!((acc.min, acc.max), (0.0, 0.8));
    }

    #[test]
    fn stats_files_reproduce_matrices() {
        let mut recs = Vec::new();
        for run in 0..20 {
            recs.push(rec("d1", "a", run, 0.9 + run as f64 * 1e-3));
            recs.push(rec("d1", "b", run, 0.5 + run as f64 * 1e-3));
            recs.push(rec("d1", "c", run, 0.5 + run as f64 * 1.1e-3));
            recs.push(rec("d2", "a", run, 0.5));
            recs.push(rec("d2", "b", run, 0.5));
            recs.push(rec("d2", "c", run, 0.5));
        }
        let ms = compare(&recs, Metric::Accuracy, 0.05).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export(&recs, &ms, dir.path()).unwrap();
        let back = read_stats(&dir.path().join("stats_accuracy.csv")).unwrap();
        assert_eq!(back.len(), 2);
        for (m, (d, algs, signs)) in ms.iter().zip(&back) {
            assert_eq!(&m.dataset, d);
            assert_eq!(&m.algorithms, algs);
            assert_eq!(&m.signs, signs);
        }
        let wins = win_counts(&ms);
        let a1 = wins.iter().find(|w| w.algorithm == "a" && w.dataset == "d1").unwrap();
        assert_eq!((a1.wins, a1.losses), (2, 0));
    }
}
