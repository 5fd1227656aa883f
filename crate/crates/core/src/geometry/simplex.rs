//! Point-in-hull membership by linear feasibility.
//!
//! `x` lies in `conv(P)` iff there are weights `w >= 0` with `sum w = 1` and
//! `sum w_k (P_k - x) = 0`. Feasibility is decided by phase 1 of the simplex
//! method on a dense tableau, with one artificial variable per row.

const EPS: f64 = 1e-10;

pub fn in_convex_hull<P: AsRef<[f64]>>(x: &[f64], points: &[P]) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = x.len();
    let m = points.len();
    let rows = n + 1;
    // columns: m weights, `rows` artificials, rhs
    let cols = m + rows + 1;
    let rhs = cols - 1;
    let mut t = vec![0.0f64; rows * cols];

    for d in 0..n {
        let row = &mut t[d * cols..(d + 1) * cols];
        let mut scale = 0.0f64;
        for (k, p) in points.iter().enumerate() {
            let v = p.as_ref()[d] - x[d];
            row[k] = v;
            scale = scale.max(v.abs());
        }
        if scale > 0.0 {
            for v in &mut row[..m] {
                *v /= scale;
            }
        }
        row[m + d] = 1.0;
    }
    {
        let row = &mut t[n * cols..(n + 1) * cols];
        for v in &mut row[..m] {
            *v = 1.0;
        }
        row[m + n] = 1.0;
        row[rhs] = 1.0;
    }

    let mut basis: Vec<usize> = (m..m + rows).collect();
    // reduced costs of the phase-1 objective (sum of artificials)
    let mut cost = vec![0.0f64; cols];
    for r in 0..rows {
        for j in 0..cols {
            if j < m || j == rhs {
                cost[j] -= t[r * cols + j];
            }
        }
    }

    let max_iter = 50 * (m + rows);
    let bland_after = 4 * (m + rows);
    for iter in 0..max_iter {
        let entering = if iter < bland_after {
            let mut best = None;
            let mut best_v = -EPS;
            for (j, &c) in cost.iter().enumerate().take(m + rows) {
                if c < best_v {
                    best_v = c;
                    best = Some(j);
                }
            }
            best
        } else {
            (0..m + rows).find(|&j| cost[j] < -EPS)
        };
        let Some(e) = entering else { break };

        let mut leave = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            let a = t[r * cols + e];
            if a > EPS {
                let ratio = t[r * cols + rhs] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - EPS
                            || (ratio <= best_ratio + EPS && basis[r] < basis[l])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        // unbounded cannot happen: the objective is bounded below by 0
        let Some(l) = leave else { break };
        pivot(&mut t, &mut cost, cols, rows, l, e);
        basis[l] = e;
    }

    // phase-1 optimum is -cost[rhs]
    -cost[rhs] < 1e-9
}

fn pivot(t: &mut [f64], cost: &mut [f64], cols: usize, rows: usize, l: usize, e: usize) {
    let p = t[l * cols + e];
    for v in &mut t[l * cols..(l + 1) * cols] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[l * cols..(l + 1) * cols].to_vec();
    for r in 0..rows {
        if r == l {
            continue;
        }
        let f = t[r * cols + e];
        if f != 0.0 {
            for (v, pv) in t[r * cols..(r + 1) * cols].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    let f = cost[e];
    if f != 0.0 {
        for (c, pv) in cost.iter_mut().zip(&pivot_row) {
            *c -= f * pv;
        }
    }
}
