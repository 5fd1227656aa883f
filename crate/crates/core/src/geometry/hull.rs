use crate::error::Result;

use super::{check_dim, in_convex_hull, BoundingBox, SampleSet};

/// Convex hull of a planar point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Hull2d {
    /// Counter-clockwise, starting from the lexicographically smallest point.
    pub vertices: Vec<[f64; 2]>,
    /// Fewer than three non-collinear input points; the hull has no area.
    pub degenerate: bool,
}

impl Hull2d {
    pub fn area(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            polygon_area(&self.vertices)
        }
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Collinear boundary points are dropped.
pub fn convex_hull_2d<P: AsRef<[f64]>>(points: &[P]) -> Hull2d {
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .map(|p| {
            let p = p.as_ref();
            [p[0], p[1]]
        })
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Hull2d {
            vertices: pts,
            degenerate: true,
        };
    }

    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    let degenerate = hull.len() < 3;
    Hull2d {
        vertices: hull,
        degenerate,
    }
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * twice.abs()
}

/// Volume of the convex hull of `points`.
///
/// Sets of at most `dim` points count as flat and get volume 0. The 1-D and 2-D
/// cases are exact; higher dimensions are estimated from `n_samples` box
/// samples, see [`hull_volume_with_samples`].
pub fn hull_volume<P: AsRef<[f64]>>(
    points: &[P],
    bbox: &BoundingBox,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let dim = bbox.dim();
    for p in points {
        check_dim(dim, p.as_ref().len())?;
    }
    if points.len() <= dim {
        return Ok(0.0);
    }
    match dim {
        1 => Ok(exact_1d(points)),
        2 => Ok(convex_hull_2d(points).area()),
        _ => {
            let samples = SampleSet::new(bbox, n_samples, seed)?;
            Ok(hull_volume_with_samples(points, &samples))
        }
    }
}

fn exact_1d<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let (lo, hi) = points
        .iter()
        .map(|p| p.as_ref()[0])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    hi - lo
}

/// Monte Carlo hull volume: the share of `samples` inside `conv(points)`
/// times the box volume. Samples outside the points' bounding box are
/// rejected before the feasibility test.
pub fn hull_volume_with_samples<P: AsRef<[f64]>>(points: &[P], samples: &SampleSet) -> f64 {
    let dim = samples.dim();
    if points.len() <= dim || samples.is_empty() {
        return 0.0;
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for (d, &v) in p.as_ref().iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    let inside = samples
        .iter()
        .filter(|x| x.iter().enumerate().all(|(d, &v)| lo[d] <= v && v <= hi[d]))
        .filter(|x| in_convex_hull(x, points))
        .count();
    inside as f64 / samples.len() as f64 * samples.box_volume()
}
