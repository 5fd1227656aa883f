//! Friedman omnibus test, then pairwise two-sided Wilcoxon rank-sum tests
//! with Holm's step-down correction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::objectives::Metric;

use super::runner::RunRecord;

/// Verdict of the row algorithm against the column algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Better,
    #[serde(rename = "-")]
    Worse,
    #[serde(rename = "~")]
    Same,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Better => "+",
            Sign::Worse => "-",
            Sign::Same => "~",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Better => Sign::Worse,
            Sign::Worse => Sign::Better,
            Sign::Same => Sign::Same,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" => Ok(Sign::Better),
            "-" | "−" => Ok(Sign::Worse),
            "~" | "∼" => Ok(Sign::Same),
            other => Err(Error::param(format!("unknown sign `{other}`"))),
        }
    }
}

/// Pairwise verdicts for one dataset and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub dataset: String,
    pub metric: Metric,
    pub algorithms: Vec<String>,
    pub friedman_statistic: f64,
    pub friedman_p: f64,
    /// Holm-adjusted pairwise p-values, 1 on the diagonal and when the
    /// omnibus test did not reject.
    pub p_adjusted: Vec<Vec<f64>>,
    pub signs: Vec<Vec<Sign>>,
}

impl ComparisonMatrix {
    pub fn sign(&self, row: &str, col: &str) -> Option<Sign> {
        let i = self.algorithms.iter().position(|a| a == row)?;
        let j = self.algorithms.iter().position(|a| a == col)?;
        Some(self.signs[i][j])
    }
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Friedman statistic and p-value for `blocks[i][j]`, block `i` and
/// treatment `j`, with the tie-corrected denominator.
pub fn friedman(blocks: &[Vec<f64>]) -> Result<(f64, f64)> {
    let n = blocks.len();
    let k = blocks.first().map_or(0, Vec::len);
    if n == 0 || k < 2 {
        return Err(Error::param("Friedman test needs at least one block and two treatments"));
    }
    if blocks.iter().any(|b| b.len() != k) {
        return Err(Error::param("Friedman blocks differ in length"));
    }
    let mut rank_sums = vec![0.0; k];
    let mut sum_sq = 0.0;
    for b in blocks {
        for (j, r) in average_ranks(b).into_iter().enumerate() {
            rank_sums[j] += r;
            sum_sq += r * r;
        }
    }
    let (nf, kf) = (n as f64, k as f64);
    let c = nf * kf * (kf + 1.0) * (kf + 1.0) / 4.0;
    let num = ((kf - 1.0) * (rank_sums.iter().map(|r| r * r).sum::<f64>() - nf * c)).max(0.0);
    let den = sum_sq - c;
    if den <= 1e-12 {
        return Ok((0.0, 1.0));
    }
    let q = num / den;
    let chi = ChiSquared::new(kf - 1.0).expect("k >= 2");
    Ok((q, (1.0 - chi.cdf(q)).clamp(0.0, 1.0)))
}

/// Two-sided Wilcoxon rank-sum test, normal approximation with tie and
/// continuity corrections. Returns `(U - n1 n2 / 2, p)`: a positive first
/// value means `x` tends to be larger.
pub fn rank_sum(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::param("rank-sum test needs two non-empty samples"));
    }
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let all: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = average_ranks(&all);
    let r1: f64 = ranks[..x.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let shift = u - n1 * n2 / 2.0;

    let mut sorted = all.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let big_n = n1 + n2;
    let var = n1 * n2 / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if var <= 0.0 {
        return Ok((shift, 1.0));
    }
    let z = (shift.abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    Ok((shift, (2.0 * (1.0 - normal.cdf(z))).min(1.0)))
}

/// Holm step-down adjusted p-values, in input order.
pub fn holm(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut adj = vec![0.0; m];
    let mut running = 0.0f64;
    for (step, &i) in order.iter().enumerate() {
        running = running.max(((m - step) as f64 * p[i]).min(1.0));
        adj[i] = running;
    }
    adj
}

/// Significance matrices, one per dataset in first-seen order. Only records
/// with status `ok` count; every algorithm of a dataset must have the same
/// run indices.
pub fn compare(records: &[RunRecord], metric: Metric, alpha: f64) -> Result<Vec<ComparisonMatrix>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha {alpha} outside (0, 1)")));
    }
    let mut datasets: Vec<&str> = Vec::new();
    for r in records {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    datasets
        .into_iter()
        .map(|d| compare_dataset(records, d, metric, alpha))
        .collect()
}

fn compare_dataset(records: &[RunRecord], dataset: &str, metric: Metric, alpha: f64) -> Result<ComparisonMatrix> {
    let rows: Vec<&RunRecord> = records.iter().filter(|r| r.dataset == dataset).collect();
    let mut algorithms: Vec<String> = Vec::new();
    for r in &rows {
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm.clone());
        }
    }
    let k = algorithms.len();
    if k < 2 {
        return Err(Error::param(format!("dataset `{dataset}` has fewer than two algorithms")));
    }

    // samples[j] sorted by run index
    let mut samples: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for r in &rows {
        if !r.is_ok() {
            continue;
        }
        let v = r.metric(metric).ok_or_else(|| Error::UnequalRuns {
            dataset: dataset.into(),
            detail: format!("{} run {} lacks {metric}", r.algorithm, r.run),
        })?;
        let j = algorithms.iter().position(|a| a == &r.algorithm).unwrap();
        samples[j].push((r.run, v));
    }
    for s in &mut samples {
        s.sort_by_key(|&(run, _)| run);
    }
    let runs: Vec<usize> = samples[0].iter().map(|&(run, _)| run).collect();
    for (j, s) in samples.iter().enumerate() {
        let these: Vec<usize> = s.iter().map(|&(run, _)| run).collect();
        if these != runs {
            return Err(Error::UnequalRuns {
                dataset: dataset.into(),
                detail: format!(
                    "{} has {} usable runs, {} has {}",
                    algorithms[0],
                    runs.len(),
                    algorithms[j],
                    these.len()
                ),
            });
        }
    }
    if runs.is_empty() {
        return Err(Error::UnequalRuns {
            dataset: dataset.into(),
            detail: "no successful runs".into(),
        });
    }

    let blocks: Vec<Vec<f64>> = (0..runs.len())
        .map(|i| samples.iter().map(|s| s[i].1).collect())
        .collect();
    let (stat, p_friedman) = friedman(&blocks)?;

    let mut signs = vec![vec![Sign::Same; k]; k];
    let mut p_adjusted = vec![vec![1.0; k]; k];
    if p_friedman < alpha {
        let mut pairs = Vec::new();
        let mut raw = Vec::new();
        for a in 0..k {
            for b in (a + 1)..k {
                let xa: Vec<f64> = samples[a].iter().map(|s| s.1).collect();
                let xb: Vec<f64> = samples[b].iter().map(|s| s.1).collect();
                let (shift, p) = rank_sum(&xa, &xb)?;
                pairs.push((a, b, shift));
                raw.push(p);
            }
        }
        for ((a, b, shift), p) in pairs.into_iter().zip(holm(&raw)) {
            p_adjusted[a][b] = p;
            p_adjusted[b][a] = p;
            if p <= alpha && shift != 0.0 {
                let s = if shift > 0.0 { Sign::Better } else { Sign::Worse };
                signs[a][b] = s;
                signs[b][a] = s.flipped();
            }
        }
    }
    Ok(ComparisonMatrix {
        dataset: dataset.into(),
        metric,
        algorithms,
        friedman_statistic: stat,
        friedman_p: p_friedman,
        p_adjusted,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand_distr::{Distribution, Normal as NormalDist};

    fn records(samples: &[(&str, Vec<f64>)]) -> Vec<RunRecord> {
        let mut out = Vec::new();
        for (name, xs) in samples {
            for (run, &x) in xs.iter().enumerate() {
                out.push(RunRecord {
                    dataset: "d".into(),
                    algorithm: name.to_string(),
                    run,
                    seed: 0,
                    accuracy: Some(x),
                    recall: Some(x),
                    specificity: Some(x),
                    injected_recall: None,
                    status: "ok".into(),
                });
            }
        }
        out
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 5.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn friedman_reference_value() {
        // three treatments over four blocks, treatment 2 always best
        let blocks = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 1.0, 3.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
        ];
        let (q, p) = friedman(&blocks).unwrap();
        // R = (5, 7, 12): 12/(4*3*4) * (25+49+144) - 3*4*4 = 6.5
        assert!((q - 6.5).abs() < 1e-12, "{q}");
        assert!((p - (-6.5f64 / 2.0).exp()).abs() < 1e-9);
        let same = vec![vec![1.0, 1.0]; 5];
        assert_eq!(friedman(&same).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn rank_sum_reference_value() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [6.0, 7.0, 8.0, 9.0, 10.0];
        let (shift, p) = rank_sum(&x, &y).unwrap();
        // U = 0, mu = 12.5, var = 25*11/12
        assert_eq!(shift, -12.5);
        let z: f64 = 12.0 / (25.0f64 * 11.0 / 12.0).sqrt();
        let expected = 2.0 * (1.0 - Normal::standard().cdf(z));
        assert!((p - expected).abs() < 1e-12);
        let (s2, p2) = rank_sum(&y, &x).unwrap();
        assert_eq!((s2, p2), (12.5, p));
    }

    #[test]
    fn holm_adjustment() {
        let adj = holm(&[0.01, 0.04, 0.03]);
        assert!((adj[0] - 0.03).abs() < 1e-15);
        assert!((adj[2] - 0.06).abs() < 1e-15);
        assert!((adj[1] - 0.06).abs() < 1e-15);
        assert_eq!(holm(&[0.9, 0.8]), vec![1.0, 1.0]);
        assert_eq!(holm(&[0.2, 0.6]), vec![0.4, 0.6]);
    }

    #[test]
    fn matrix_shape_and_antisymmetry() {
        let mut rng = seeded(1);
        let n = |m: f64| NormalDist::new(m, 0.01).unwrap();
        let mut draw = |m: f64| -> Vec<f64> { (0..30).map(|_| n(m).sample(&mut rng)).collect() };
        let recs = records(&[("hi", draw(0.9)), ("lo", draw(0.5)), ("mid", draw(0.7))]);
        let m = &compare(&recs, Metric::Accuracy, 0.05).unwrap()[0];
        assert_eq!(m.sign("hi", "lo"), Some(Sign::Better));
        assert_eq!(m.sign("lo", "hi"), Some(Sign::Worse));
        assert_eq!(m.sign("mid", "lo"), Some(Sign::Better));
        for i in 0..3 {
            assert_eq!(m.signs[i][i], Sign::Same);
            for j in 0..3 {
                assert_eq!(m.signs[i][j], m.signs[j][i].flipped());
            }
        }
    }

    #[test]
    fn unequal_runs_error() {
        let mut recs = records(&[("a", vec![0.1, 0.2, 0.3]), ("b", vec![0.4, 0.5, 0.6])]);
        recs.pop();
        assert!(matches!(compare(&recs, Metric::Accuracy, 0.05), Err(Error::UnequalRuns { .. })));
    }

    #[test]
    fn sign_parsing() {
        for s in [Sign::Better, Sign::Worse, Sign::Same] {
            assert_eq!(s.symbol().parse::<Sign>().unwrap(), s);
        }
        assert_eq!("∼".parse::<Sign>().unwrap(), Sign::Same);
    }
}
