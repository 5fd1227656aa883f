//! Variation operators: self-adaptive site mutation and hyperplane crossover.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genotype::{random_site, Individual, SigmaBounds, Site, SiteBounds};
use crate::geometry::{dot, BoundingBox, Hyperplane};

/// Retry cap for drawing a separating hyperplane in crossover.
pub const DEFAULT_MAX_RETRIES: usize = 32;

/// Probabilities and learning rate of the mutation operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationParams {
    /// Probability that a site is mutated at all.
    pub p_s: f64,
    /// Per-coordinate mutation probability for a selected site.
    pub p_f: f64,
    /// Label flip probability for a selected site.
    pub p_t: f64,
    /// Probability of appending a random site.
    pub p_plus: f64,
    /// Probability of removing a random site.
    pub p_minus: f64,
    /// Log-normal learning rate of the step sizes.
    pub eta: f64,
}

impl Default for MutationParams {
    fn default() -> Self {
        Self {
            p_s: 0.5,
            p_f: 0.5,
            p_t: 0.1,
            p_plus: 0.2,
            p_minus: 0.1,
            eta: 0.5,
        }
    }
}

impl MutationParams {
    /// All probabilities zero: mutation is the identity.
    pub fn none() -> Self {
        Self {
            p_s: 0.0,
            p_f: 0.0,
            p_t: 0.0,
            p_plus: 0.0,
            p_minus: 0.0,
            eta: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_s", self.p_s),
            ("p_f", self.p_f),
            ("p_t", self.p_t),
            ("p_plus", self.p_plus),
            ("p_minus", self.p_minus),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(Error::param(format!("eta = {} must be > 0", self.eta)));
        }
        Ok(())
    }
}

/// Deterministic core of the self-adaptive update, given the two standard
/// normal draws: the step size moves first and the coordinate uses the new
/// step size.
pub fn mutate_coord_with(
    x: f64,
    sigma: f64,
    eta: f64,
    bounds: SigmaBounds,
    z_sigma: f64,
    z_x: f64,
) -> (f64, f64) {
    let sigma = bounds.clamp(sigma * (eta * z_sigma).exp());
    (x + sigma * z_x, sigma)
}

pub fn self_adaptive_mutate_coord<R: Rng + ?Sized>(
    x: f64,
    sigma: f64,
    eta: f64,
    bounds: SigmaBounds,
    rng: &mut R,
) -> (f64, f64) {
    let z_sigma: f64 = rng.sample(StandardNormal);
    let z_x: f64 = rng.sample(StandardNormal);
    mutate_coord_with(x, sigma, eta, bounds, z_sigma, z_x)
}

/// Mutate every site with probability `p_s`, then maybe append and maybe
/// remove a site. Additions and removals that would leave `bounds` are
/// skipped.
pub fn mutate_voronoi<R: Rng + ?Sized>(
    ind: &Individual,
    params: &MutationParams,
    bounds: SiteBounds,
    bbox: &BoundingBox,
    rng: &mut R,
) -> Individual {
    let mut sites = ind.sites.clone();
    for site in &mut sites {
        if rng.random::<f64>() < params.p_s {
            for d in 0..site.coords.len() {
                if rng.random::<f64>() < params.p_f {
                    let (x, s) = self_adaptive_mutate_coord(
                        site.coords[d],
                        site.sigmas[d],
                        params.eta,
                        SigmaBounds::for_axis(bbox, d),
                        rng,
                    );
                    site.coords[d] = x;
                    site.sigmas[d] = s;
                }
            }
            if rng.random::<f64>() < params.p_t {
                site.label = site.label.flipped();
            }
        }
    }
    if rng.random::<f64>() < params.p_plus && sites.len() < bounds.max {
        sites.push(random_site(bbox, rng));
    }
    if rng.random::<f64>() < params.p_minus && sites.len() > bounds.min {
        let i = rng.random_range(0..sites.len());
        sites.remove(i);
    }
    Individual::new(sites)
}

/// A uniformly oriented hyperplane through a randomly chosen site.
pub fn random_hyperplane<R: Rng + ?Sized>(sites: &[&Site], rng: &mut R) -> Result<Hyperplane> {
    let anchor = sites.choose(rng).ok_or(Error::EmptyDiagram)?;
    let dim = anchor.dim();
    let normal = loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-12 {
            break v.into_iter().map(|x| x / norm).collect::<Vec<f64>>();
        }
    };
    let offset = dot(&normal, &anchor.coords);
    Ok(Hyperplane { normal, offset })
}

/// Sites strictly below the plane, and sites on or above it.
pub fn split_individual(ind: &Individual, plane: &Hyperplane) -> (Vec<Site>, Vec<Site>) {
    ind.sites
        .iter()
        .cloned()
        .partition(|s| dot(&plane.normal, &s.coords) < plane.offset)
}

/// Offspring of [`crossover_voronoi`].
#[derive(Debug, Clone)]
pub struct CrossoverOutcome {
    pub first: Individual,
    pub second: Individual,
    /// An offspring was outside the site bounds and had sites added or
    /// removed.
    pub repaired: bool,
    /// No separating plane was found; the offspring are parent copies.
    pub fell_back: bool,
    /// The cutting plane, absent on fallback.
    pub plane: Option<Hyperplane>,
}

/// Geometric crossover: cut both parents with one random hyperplane and swap
/// the parts above it.
pub fn crossover_voronoi<R: Rng + ?Sized>(
    i1: &Individual,
    i2: &Individual,
    bounds: SiteBounds,
    rng: &mut R,
    max_retries: usize,
) -> Result<CrossoverOutcome> {
    match (i1.dim(), i2.dim()) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::DimensionMismatch {
                expected: a,
                got: b,
            })
        }
        (None, _) | (_, None) => return Err(Error::EmptyDiagram),
        _ => {}
    }
    let union: Vec<&Site> = i1.sites.iter().chain(&i2.sites).collect();
    for _ in 0..max_retries {
        let plane = random_hyperplane(&union, rng)?;
        let (below1, above1) = split_individual(i1, &plane);
        let (below2, above2) = split_individual(i2, &plane);
        if below1.is_empty() || above1.is_empty() || below2.is_empty() || above2.is_empty() {
            continue;
        }
        let mut o1: Vec<Site> = below1;
        o1.extend(above2);
        let mut o2: Vec<Site> = below2;
        o2.extend(above1);
        let r1 = repair(&mut o1, bounds, rng);
        let r2 = repair(&mut o2, bounds, rng);
        return Ok(CrossoverOutcome {
            first: Individual::new(o1),
            second: Individual::new(o2),
            repaired: r1 || r2,
            fell_back: false,
            plane: Some(plane),
        });
    }
    Ok(CrossoverOutcome {
        first: Individual::new(i1.sites.clone()),
        second: Individual::new(i2.sites.clone()),
        repaired: false,
        fell_back: true,
        plane: None,
    })
}

/// Bring a site list back into `bounds`: drop random sites above the maximum,
/// add jittered copies of random sites below the minimum.
fn repair<R: Rng + ?Sized>(sites: &mut Vec<Site>, bounds: SiteBounds, rng: &mut R) -> bool {
    let mut changed = false;
    while sites.len() > bounds.max {
        let i = rng.random_range(0..sites.len());
        sites.remove(i);
        changed = true;
    }
    while sites.len() < bounds.min && !sites.is_empty() {
        let mut copy = sites[rng.random_range(0..sites.len())].clone();
        for (x, s) in copy.coords.iter_mut().zip(&copy.sigmas) {
            let z: f64 = rng.sample(StandardNormal);
            *x += s * z;
        }
        sites.push(copy);
        changed = true;
    }
    changed
}
