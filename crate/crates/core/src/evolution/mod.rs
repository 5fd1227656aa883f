//! Generational NSGA-II over labeled Voronoi diagrams.
//!
//! Each generation draws parents by crowded binary tournament, applies
//! crossover with probability `mating_prob`, always mutates the children,
//! evaluates them and keeps the best `pop_size` of parents plus offspring.
//! Variation and evaluation run in parallel; every pair owns an rng stream
//! derived from the run seed, so results do not depend on thread count.

mod committee;
mod pareto;

use std::io::Write;
use std::path::Path;

use log::debug;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use committee::{committee_classify, committee_select, committee_size, Committee};
pub use pareto::{
    crowding_distance, dominates, hypervolume, non_dominated_sort, nsga2_select, rank_population,
    select_indices, ParetoRanking, Selection,
};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::genotype::{random_individual_with, Individual, SiteBounds};
use crate::geometry::{self, BoundingBox};
use crate::objectives::{evaluate_in, GeomConfig, ObjectiveSet, VolumeContext};
use crate::operators::{crossover_voronoi, mutate_voronoi, MutationParams, DEFAULT_MAX_RETRIES};
use crate::rng::{derive_seed, seeded, StdRng};

fn default_pop() -> usize {
    100
}
fn default_generations() -> usize {
    500
}
fn default_mating() -> f64 {
    0.5
}
fn default_p_min() -> usize {
    20
}
fn default_p_max() -> usize {
    100
}
fn default_objectives() -> ObjectiveSet {
    ObjectiveSet::amt()
}
fn default_rho() -> f64 {
    0.05
}
fn default_samples() -> usize {
    50_000
}
fn default_true() -> bool {
    true
}
fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    #[serde(default = "default_pop")]
    pub pop_size: usize,
    #[serde(default = "default_pop")]
    pub offspring: usize,
    #[serde(default = "default_generations")]
    pub generations: usize,
    #[serde(default = "default_mating")]
    pub mating_prob: f64,
    #[serde(default)]
    pub mutation: MutationParams,
    #[serde(default = "default_p_min")]
    pub p_min: usize,
    #[serde(default = "default_p_max")]
    pub p_max: usize,
    #[serde(default = "default_objectives")]
    pub objective_set: ObjectiveSet,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub seed: u64,
    /// Monte Carlo samples per volume estimate outside the exact 2-D path.
    #[serde(default = "default_samples")]
    pub volume_samples: usize,
    #[serde(default = "default_true")]
    pub exact_2d: bool,
    #[serde(default = "default_retries")]
    pub crossover_retries: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            pop_size: default_pop(),
            offspring: default_pop(),
            generations: default_generations(),
            mating_prob: default_mating(),
            mutation: MutationParams::default(),
            p_min: default_p_min(),
            p_max: default_p_max(),
            objective_set: default_objectives(),
            rho: default_rho(),
            seed: 0,
            volume_samples: default_samples(),
            exact_2d: true,
            crossover_retries: default_retries(),
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::param("pop_size must be at least 2"));
        }
        if self.offspring < 1 {
            return Err(Error::param("offspring must be at least 1"));
        }
        if self.generations < 1 {
            return Err(Error::param("generations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.mating_prob) {
            return Err(Error::param("mating_prob must lie in [0, 1]"));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::param("rho must lie in (0, 1]"));
        }
        if self.volume_samples == 0 {
            return Err(Error::param("volume_samples must be positive"));
        }
        self.mutation.validate()?;
        self.site_bounds()?;
        Ok(())
    }

    pub fn site_bounds(&self) -> Result<SiteBounds> {
        SiteBounds::new(self.p_min, self.p_max)
    }

    /// Volume settings for this run; the sample seed is derived from `seed`.
    pub fn geometry(&self) -> GeomConfig {
        GeomConfig {
            n_samples: self.volume_samples,
            seed: derive_seed(self.seed, &["geometry"]),
            exact_2d: self.exact_2d,
        }
    }
}

/// One row of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// 0 for the initial population.
    pub generation: usize,
    pub best: Vec<f64>,
    pub median: Vec<f64>,
    pub front0_size: usize,
    /// Hypervolume of front 0 with the origin as reference.
    pub hypervolume: f64,
    /// Survivor selection had to cut into front 0.
    pub front0_truncated: bool,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub population: Vec<Individual>,
    pub committee: Committee,
    pub history: Vec<GenerationStats>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn stats(generation: usize, pop: &[Individual], ranking: &ParetoRanking, truncated: bool) -> GenerationStats {
    let objs: Vec<&[f64]> = pop
        .iter()
        .map(|i| i.objectives.as_ref().expect("evaluated").values())
        .collect();
    let m = objs[0].len();
    let mut best = Vec::with_capacity(m);
    let mut med = Vec::with_capacity(m);
    for k in 0..m {
        let mut col: Vec<f64> = objs.iter().map(|o| o[k]).collect();
        col.sort_by(f64::total_cmp);
        best.push(*col.last().unwrap());
        med.push(median(&col));
    }
    let front: Vec<&[f64]> = ranking.fronts[0].iter().map(|&i| objs[i]).collect();
    GenerationStats {
        generation,
        best,
        median: med,
        front0_size: front.len(),
        hypervolume: hypervolume(&front),
        front0_truncated: truncated,
    }
}

fn tournament(ranking: &ParetoRanking, n: usize, rng: &mut StdRng) -> usize {
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    if ranking.better(a, b) || (!ranking.better(b, a) && a <= b) {
        a
    } else {
        b
    }
}

fn evaluate_all(
    pop: &mut [Individual],
    train: &Dataset,
    set: &ObjectiveSet,
    ctx: &VolumeContext,
    generation: usize,
) -> Result<()> {
    pop.par_iter_mut()
        .filter(|ind| !ind.is_evaluated())
        .try_for_each(|ind| {
            let e = evaluate_in(ind, train, set, ctx)?;
            ind.objectives = Some(e.objectives);
            ind.accuracy = Some(e.accuracy);
            ind.eval_stamp = Some(generation as u64);
            Ok(())
        })
}

/// Run the full evolution.
pub fn evolve(train: &Dataset, cfg: &EvolutionConfig, bbox: &BoundingBox) -> Result<EvolutionResult> {
    evolve_with(train, cfg, bbox, |_, _| {})
}

/// [`evolve`] with a callback after every generation, e.g. for logging or
/// checkpoints.
pub fn evolve_with<F>(train: &Dataset, cfg: &EvolutionConfig, bbox: &BoundingBox, mut observe: F) -> Result<EvolutionResult>
where
    F: FnMut(&GenerationStats, &[Individual]),
{
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    geometry::check_dim(bbox.dim(), train.dim)?;
    let bounds = cfg.site_bounds()?;
    let set = &cfg.objective_set;
    let ctx = VolumeContext::new(bbox, &cfg.geometry())?;

    let mut pop: Vec<Individual> = (0..cfg.pop_size)
        .map(|i| {
            let mut rng = seeded(derive_seed(cfg.seed, &["init", &i.to_string()]));
            random_individual_with(bounds, bbox, &mut rng)
        })
        .collect();
    evaluate_all(&mut pop, train, set, &ctx, 0)?;
    let mut ranking = rank_population(&pop)?;
    let mut history = vec![stats(0, &pop, &ranking, false)];
    observe(&history[0], &pop);

    let mut select_rng = seeded(derive_seed(cfg.seed, &["select"]));
    let pairs = cfg.offspring.div_ceil(2);
    for generation in 1..=cfg.generations {
        let parents: Vec<(usize, usize)> = (0..pairs)
            .map(|_| {
                let a = tournament(&ranking, pop.len(), &mut select_rng);
                let b = tournament(&ranking, pop.len(), &mut select_rng);
                (a, b)
            })
            .collect();
        let gen_tag = generation.to_string();
        let children: Vec<[Individual; 2]> = parents
            .par_iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let mut rng = seeded(derive_seed(cfg.seed, &["vary", &gen_tag, &k.to_string()]));
                let (c1, c2) = if rng.random::<f64>() < cfg.mating_prob {
                    let out = crossover_voronoi(&pop[a], &pop[b], bounds, &mut rng, cfg.crossover_retries)?;
                    (out.first, out.second)
                } else {
                    (pop[a].clone(), pop[b].clone())
                };
                Ok([
                    mutate_voronoi(&c1, &cfg.mutation, bounds, bbox, &mut rng),
                    mutate_voronoi(&c2, &cfg.mutation, bounds, bbox, &mut rng),
                ])
            })
            .collect::<Result<_>>()?;
        let mut offspring: Vec<Individual> = children.into_iter().flatten().take(cfg.offspring).collect();
        evaluate_all(&mut offspring, train, set, &ctx, generation)?;

        let mut union = std::mem::take(&mut pop);
        union.append(&mut offspring);
        let objs: Vec<&[f64]> = union
            .iter()
            .map(|i| i.objectives.as_ref().expect("evaluated").values())
            .collect();
        let sel = select_indices(&objs, cfg.pop_size)?;
        let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
        pop = sel.indices.iter().map(|&i| slots[i].take().unwrap()).collect();
        ranking = rank_population(&pop)?;
        let row = stats(generation, &pop, &ranking, sel.front0_truncated);
        debug!(
            "generation {generation}: front0 {} hv {:.6} best {:?}",
            row.front0_size, row.hypervolume, row.best
        );
        observe(&row, &pop);
        history.push(row);
    }

    let committee = committee_select(&pop, cfg.rho)?;
    Ok(EvolutionResult {
        population: pop,
        committee,
        history,
    })
}

/// One CSV row per generation: `gen`, best and median of each objective,
/// front-0 size, hypervolume and the truncation flag.
pub fn write_history_csv<W: Write>(history: &[GenerationStats], set: &ObjectiveSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["gen".to_string()];
    for id in set.ids() {
        header.push(format!("best_{}", id.code()));
        header.push(format!("median_{}", id.code()));
    }
    header.extend(["front0_size", "hypervolume", "front0_truncated"].map(String::from));
    w.write_record(&header)?;
    for row in history {
        let mut rec = vec![row.generation.to_string()];
        for (b, m) in row.best.iter().zip(&row.median) {
            rec.push(b.to_string());
            rec.push(m.to_string());
        }
        rec.push(row.front0_size.to_string());
        rec.push(row.hypervolume.to_string());
        rec.push(row.front0_truncated.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("history", e))?;
    Ok(())
}

pub fn save_history_csv(history: &[GenerationStats], set: &ObjectiveSet, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_history_csv(history, set, f)
}

/// Write a population as a JSON array of genotypes.
pub fn save_population(pop: &[Individual], path: &Path) -> Result<()> {
    let s = serde_json::to_string_pretty(pop)?;
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn load_population(path: &Path) -> Result<Vec<Individual>> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}
