//! Anomaly detection with labeled Voronoi diagrams evolved under several
//! objectives.
//!
//! A detector ([`genotype::Individual`]) is a list of labeled sites; a point
//! takes the label of its nearest site. [`evolution::evolve`] searches for
//! detectors with NSGA-II style selection over the objectives in
//! [`objectives`], and returns a voting [`evolution::Committee`].
//! [`harness`] runs seeded experiments against the reference detectors in
//! [`baselines`] and tests the differences for significance.
//!
//! ```
//! use voreal::datasets::{generate, GeneratorKind, GeneratorSpec};
//! use voreal::evolution::{evolve, EvolutionConfig};
//!
//! let data = generate(&GeneratorSpec::new(GeneratorKind::Corners, 120, 0.02, 1)).unwrap();
//! let cfg = EvolutionConfig { pop_size: 8, offspring: 8, generations: 3, p_min: 4, p_max: 16, ..Default::default() };
//! let result = evolve(&data, &cfg, &data.bounding_box().unwrap()).unwrap();
//! let label = result.committee.classify(&data.points[0]).unwrap();
//! # let _ = label;
//! ```

pub mod baselines;
pub mod datasets;
pub mod error;
pub mod evolution;
pub mod genotype;
pub mod geometry;
pub mod harness;
pub mod objectives;
pub mod operators;
pub mod rng;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/variation.md")]
    mod variation {}
    #[doc = include_str!("../../../book/src/objectives.md")]
    mod objectives {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
