use crate::error::{Error, Result};

use super::{check_dim, dist2, nearest_unchecked, polygon_area, BoundingBox, SampleSet};

/// Per-cell volumes and data statistics for one diagram.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VolumeReport {
    /// `v_i`, one per site.
    pub cell_volumes: Vec<f64>,
    /// Volume of the convex hull of `D_i`; 0 when `|D_i| <= n`.
    pub hull_volumes: Vec<f64>,
    /// `|D_i|` per site.
    pub counts: Vec<usize>,
    /// Monte Carlo samples behind the volumes, 0 for exact volumes.
    pub samples_used: usize,
}

/// How many of `samples` fall in each site's cell.
pub fn cell_counts<S: AsRef<[f64]>>(sites: &[S], samples: &SampleSet) -> Result<Vec<usize>> {
    let first = sites.first().ok_or(Error::EmptyDiagram)?;
    check_dim(samples.dim(), first.as_ref().len())?;
    let mut counts = vec![0usize; sites.len()];
    for p in samples.iter() {
        counts[nearest_unchecked(p, sites)] += 1;
    }
    Ok(counts)
}

pub fn cell_volumes_from_counts(counts: &[usize], samples: &SampleSet) -> Vec<f64> {
    let n = samples.len() as f64;
    counts
        .iter()
        .map(|&c| c as f64 / n * samples.box_volume())
        .collect()
}

/// Monte Carlo cell volumes: the fraction of `n_samples` stratified box
/// samples whose nearest site is `i`, times the box volume.
pub fn cell_volumes_mc<S: AsRef<[f64]>>(
    sites: &[S],
    bbox: &BoundingBox,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if sites.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let samples = SampleSet::new(bbox, n_samples, seed)?;
    let counts = cell_counts(sites, &samples)?;
    Ok(cell_volumes_from_counts(&counts, &samples))
}

/// Exact cell areas of a 2-D diagram clipped to `bbox`.
pub fn cell_volumes_exact_2d<S: AsRef<[f64]>>(sites: &[S], bbox: &BoundingBox) -> Result<Vec<f64>> {
    if bbox.dim() != 2 {
        return Err(Error::NotTwoDimensional(bbox.dim()));
    }
    if sites.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    for s in sites {
        let len = s.as_ref().len();
        if len != 2 {
            return Err(Error::NotTwoDimensional(len));
        }
    }
    Ok((0..sites.len())
        .map(|i| polygon_area(&clip_cell_2d(sites, i, bbox)))
        .collect())
}

/// Polygon of cell `i` inside `bbox`, counter-clockwise. Empty when the cell
/// is empty, which happens for a site duplicating a lower-indexed one.
pub fn clip_cell_2d<S: AsRef<[f64]>>(sites: &[S], i: usize, bbox: &BoundingBox) -> Vec<[f64; 2]> {
    let si = sites[i].as_ref();
    let (lo, hi) = (bbox.lo(), bbox.hi());
    let mut poly = vec![
        [lo[0], lo[1]],
        [hi[0], lo[1]],
        [hi[0], hi[1]],
        [lo[0], hi[1]],
    ];

    let mut others: Vec<(f64, usize)> = Vec::with_capacity(sites.len().saturating_sub(1));
    for (j, s) in sites.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = dist2(si, s.as_ref());
        if d == 0.0 {
            if j < i {
                return Vec::new();
            }
            continue;
        }
        others.push((d, j));
    }
    others.sort_by(|a, b| a.0.total_cmp(&b.0));

    for (d2, j) in others {
        // A bisector lies at distance |S_i S_j| / 2 from S_i; once every
        // polygon vertex is closer than that, no further site can cut.
        let reach2 = poly
            .iter()
            .map(|v| dist2(v, si))
            .fold(0.0f64, f64::max);
        if 4.0 * reach2 <= d2 {
            break;
        }
        let sj = sites[j].as_ref();
        // keep {x : (S_j - S_i) . x <= (|S_j|^2 - |S_i|^2) / 2}
        let a = [sj[0] - si[0], sj[1] - si[1]];
        let b = 0.5 * ((sj[0] * sj[0] + sj[1] * sj[1]) - (si[0] * si[0] + si[1] * si[1]));
        poly = clip_half_plane(&poly, a, b);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Sutherland-Hodgman step against `{x : a . x <= b}`.
fn clip_half_plane(poly: &[[f64; 2]], a: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let side = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] - b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let cur = poly[k];
        let next = poly[(k + 1) % poly.len()];
        let (fc, fn_) = (side(&cur), side(&next));
        if fc <= 0.0 {
            out.push(cur);
        }
        if (fc < 0.0 && fn_ > 0.0) || (fc > 0.0 && fn_ < 0.0) {
            let t = fc / (fc - fn_);
            out.push([cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])]);
        }
    }
    if out.len() < 3 {
        out.clear();
    }
    out
}
