//! Bounded Voronoi geometry: point location, cell volumes, convex hulls.
//!
//! Voronoi cells are unbounded, so every volume in this crate is measured
//! inside a [`BoundingBox`]. In two dimensions cell areas are exact (half-plane
//! clipping); in higher dimensions they are Monte Carlo estimates over a
//! [`SampleSet`] that can be shared between individuals so that comparisons
//! use common random numbers.
//!
//! Site positions are accepted as any `AsRef<[f64]>`, so plain `Vec<f64>`
//! points and [`crate::genotype::Site`] values both work.

mod hull;
mod simplex;
mod voronoi;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub use hull::{convex_hull_2d, hull_volume, hull_volume_with_samples, polygon_area, Hull2d};
pub use simplex::in_convex_hull;
pub use voronoi::{
    cell_counts, cell_volumes_exact_2d, cell_volumes_from_counts, cell_volumes_mc,
    clip_cell_2d, VolumeReport,
};

/// Axis-aligned region on which all volumes are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidBox(format!(
                "lo has {} coordinates, hi has {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.is_empty() {
            return Err(Error::InvalidBox("zero dimensions".into()));
        }
        for (d, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidBox(format!(
                    "dimension {d}: need finite lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The unit hypercube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Self::new(vec![0.0; dim], vec![1.0; dim]).expect("dim >= 1")
    }

    /// Axis-aligned bounds of `points`, expanded by `margin` times the extent
    /// on each side. Flat dimensions get an extent of 1.
    pub fn around<P: AsRef<[f64]>>(points: &[P], margin: f64) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?.as_ref();
        let dim = first.len();
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in points {
            let p = p.as_ref();
            check_dim(dim, p.len())?;
            for d in 0..dim {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        for d in 0..dim {
            let extent = hi[d] - lo[d];
            let extent = if extent > 0.0 { extent } else { 1.0 };
            lo[d] -= margin * extent;
            hi[d] += margin * extent;
        }
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn extent(&self, d: usize) -> f64 {
        self.hi[d] - self.lo[d]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|d| self.extent(d)).product()
    }

    pub fn diagonal(&self) -> f64 {
        (0..self.dim())
            .map(|d| self.extent(d).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *l <= *x && *x <= *h)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim())
            .map(|d| self.lo[d] + rng.random::<f64>() * self.extent(d))
            .collect()
    }
}

/// A hyperplane `{x : normal . x = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    /// Signed distance of `p` from the plane.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

/// Points spread over a box, stored flat. Reused across individuals so that
/// their Monte Carlo volumes share the same random numbers.
///
/// Samples are drawn by jittered-grid stratification: the box is cut into
/// `k^dim` equal strata with `k = floor(n^(1/dim))`, one uniform point is drawn
/// in each, and the remaining `n - k^dim` points are drawn uniformly over the
/// whole box. Every sample is marginally uniform, so the cell-count estimator
/// stays unbiased while its variance drops sharply for cell indicators.
#[derive(Debug, Clone)]
pub struct SampleSet {
    dim: usize,
    coords: Vec<f64>,
    box_volume: f64,
}

impl SampleSet {
    pub fn new(bbox: &BoundingBox, n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::param("n_samples must be at least 1"));
        }
        let mut rng = rng::seeded(seed);
        let dim = bbox.dim();
        let k = strata_per_axis(n_samples, dim);
        let n_grid = k.pow(dim as u32);
        let mut coords = Vec::with_capacity(n_samples * dim);
        let mut cell = vec![0usize; dim];
        for _ in 0..n_grid {
            for (d, &c) in cell.iter().enumerate() {
                let u = (c as f64 + rng.random::<f64>()) / k as f64;
                coords.push(bbox.lo[d] + u * bbox.extent(d));
            }
            for c in cell.iter_mut() {
                *c += 1;
                if *c < k {
                    break;
                }
                *c = 0;
            }
        }
        for _ in n_grid..n_samples {
            for d in 0..dim {
                coords.push(bbox.lo[d] + rng.random::<f64>() * bbox.extent(d));
            }
        }
        Ok(Self {
            dim,
            coords,
            box_volume: bbox.volume(),
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_volume(&self) -> f64 {
        self.box_volume
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }
}

/// Largest `k` with `k^dim <= n`.
fn strata_per_axis(n: usize, dim: usize) -> usize {
    let mut k = (n as f64).powf(1.0 / dim as f64).floor() as usize;
    let fits = |k: usize| k.checked_pow(dim as u32).is_some_and(|v| v <= n);
    while k > 1 && !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k.max(1)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Index of the site closest to `point` in Euclidean distance. Ties go to the
/// lowest index.
pub fn nearest_site<S: AsRef<[f64]>>(point: &[f64], sites: &[S]) -> Result<usize> {
    let first = sites.first().ok_or(Error::EmptyDiagram)?;
    check_dim(first.as_ref().len(), point.len())?;
    Ok(nearest_unchecked(point, sites))
}

#[inline]
pub(crate) fn nearest_unchecked<S: AsRef<[f64]>>(point: &[f64], sites: &[S]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in sites.iter().enumerate() {
        let d = dist2(point, s.as_ref());
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Split `data` into the per-cell subsets `D_i`, returned as index lists.
pub fn assign_points<P, S>(data: &[P], sites: &[S]) -> Result<Vec<Vec<usize>>>
where
    P: AsRef<[f64]>,
    S: AsRef<[f64]>,
{
    let first = sites.first().ok_or(Error::EmptyDiagram)?;
    let dim = first.as_ref().len();
    let mut parts = vec![Vec::new(); sites.len()];
    for (k, p) in data.iter().enumerate() {
        let p = p.as_ref();
        check_dim(dim, p.len())?;
        parts[nearest_unchecked(p, sites)].push(k);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn brute_nearest(p: &[f64], sites: &[Vec<f64>]) -> usize {
        // first strict minimum over an exhaustive scan
        let d: Vec<f64> = sites.iter().map(|s| dist2(p, s)).collect();
        let m = d.iter().cloned().fold(f64::INFINITY, f64::min);
        d.iter().position(|&x| x == m).unwrap()
    }

    #[test]
    fn nearest_site_basic_and_ties() {
        let sites = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        assert_eq!(nearest_site(&[0.0, 0.0], &sites).unwrap(), 0);
        let sites = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert_eq!(nearest_site(&[0.0, 5.0], &sites).unwrap(), 0);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(matches!(
            nearest_site(&[0.0, 0.0], &empty),
            Err(Error::EmptyDiagram)
        ));
        assert!(nearest_site(&[0.0], &sites).is_err());
    }

    #[test]
    fn nearest_site_matches_exhaustive_scan() {
        let mut rng = seeded(11);
        let bbox = BoundingBox::unit(2);
        let sites: Vec<Vec<f64>> = (0..10).map(|_| bbox.sample(&mut rng)).collect();
        for _ in 0..50 {
            let p = bbox.sample(&mut rng);
            assert_eq!(nearest_site(&p, &sites).unwrap(), brute_nearest(&p, &sites));
        }
    }

    #[test]
    fn assign_points_partitions_data() {
        let mut rng = seeded(3);
        let bbox = BoundingBox::unit(2);
        let sites: Vec<Vec<f64>> = (0..20).map(|_| bbox.sample(&mut rng)).collect();
        let data: Vec<Vec<f64>> = (0..200).map(|_| bbox.sample(&mut rng)).collect();
        let parts = assign_points(&data, &sites).unwrap();
        assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), 200);
        for (i, part) in parts.iter().enumerate() {
            for &k in part {
                assert_eq!(brute_nearest(&data[k], &sites), i);
            }
        }

        let none: Vec<Vec<f64>> = vec![];
        assert!(assign_points(&none, &sites)
            .unwrap()
            .iter()
            .all(Vec::is_empty));
        let one = vec![vec![0.5, 0.5]];
        assert_eq!(assign_points(&data, &one).unwrap()[0].len(), 200);
    }

    #[test]
    fn strata_cover_the_sample_budget() {
        assert_eq!(strata_per_axis(200_000, 2), 447);
        assert_eq!(strata_per_axis(50_000, 3), 36);
        assert_eq!(strata_per_axis(27, 3), 3);
        assert_eq!(strata_per_axis(26, 3), 2);
        assert_eq!(strata_per_axis(1, 5), 1);
        let b = BoundingBox::new(vec![-2.0, 1.0, 0.0], vec![2.0, 3.0, 0.5]).unwrap();
        let s = SampleSet::new(&b, 1000, 1).unwrap();
        assert_eq!(s.len(), 1000);
        assert!(s.iter().all(|p| b.contains(p)));
    }

    #[test]
    fn box_validation_and_volume() {
        assert!(BoundingBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(BoundingBox::new(vec![0.0, 0.0], vec![1.0]).is_err());
        let b = BoundingBox::new(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap();
        assert_eq!(b.volume(), 1.0);
        let around = BoundingBox::around(&[vec![0.0, 0.0], vec![10.0, 0.0]], 0.1).unwrap();
        assert_eq!(around.lo(), &[-1.0, -0.1]);
        assert_eq!(around.hi(), &[11.0, 0.1]);
    }
}
