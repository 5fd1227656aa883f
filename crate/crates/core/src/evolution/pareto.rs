//! Non-dominated sorting, crowding distance and elitist survivor selection.
//! Every objective is maximized.

use crate::error::{Error, Result};
use crate::genotype::Individual;
use crate::objectives::ObjectiveVector;

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `a` is at least as good as `b` everywhere and better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::ObjectiveLength(a.len(), b.len()));
    }
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Fronts and crowding distances of a population.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoRanking {
    /// Index lists, front 0 non-dominated; each list ascending.
    pub fronts: Vec<Vec<usize>>,
    /// Crowding distance within the individual's own front.
    pub crowding: Vec<f64>,
    /// Front number of each individual.
    pub rank: Vec<usize>,
}

impl ParetoRanking {
    /// `i` beats `j` in a crowded tournament: lower rank, then larger
    /// crowding distance.
    pub fn better(&self, i: usize, j: usize) -> bool {
        self.rank[i] < self.rank[j] || (self.rank[i] == self.rank[j] && self.crowding[i] > self.crowding[j])
    }
}

fn check_uniform<V: AsRef<[f64]>>(pop: &[V]) -> Result<usize> {
    let m = pop.first().ok_or(Error::EmptyPopulation)?.as_ref().len();
    for v in pop {
        if v.as_ref().len() != m {
            return Err(Error::ObjectiveLength(m, v.as_ref().len()));
        }
    }
    Ok(m)
}

/// Fast non-dominated sort followed by per-front crowding distances.
pub fn non_dominated_sort<V: AsRef<[f64]>>(pop: &[V]) -> Result<ParetoRanking> {
    check_uniform(pop)?;
    let n = pop.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dom_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (pop[i].as_ref(), pop[j].as_ref());
            if dominates_unchecked(a, b) {
                dominated_by_me[i].push(j);
                dom_count[j] += 1;
            } else if dominates_unchecked(b, a) {
                dominated_by_me[j].push(i);
                dom_count[i] += 1;
            }
        }
    }

    let mut rank = vec![0usize; n];
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dom_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = fronts.len();
            for &j in &dominated_by_me[i] {
                dom_count[j] -= 1;
                if dom_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }

    let mut crowding = vec![0.0; n];
    for front in &fronts {
        for (k, d) in crowding_distance(pop, front).into_iter().enumerate() {
            crowding[front[k]] = d;
        }
    }
    Ok(ParetoRanking {
        fronts,
        crowding,
        rank,
    })
}

/// Crowding distances of the members of `front`, in `front` order. The two
/// extremes of every objective get infinity; interior members sum the gap
/// between their neighbours divided by the objective's range.
pub fn crowding_distance<V: AsRef<[f64]>>(pop: &[V], front: &[usize]) -> Vec<f64> {
    let len = front.len();
    let mut dist = vec![0.0; len];
    if len <= 2 {
        return vec![f64::INFINITY; len];
    }
    let m = pop[front[0]].as_ref().len();
    let mut order: Vec<usize> = (0..len).collect();
    for obj in 0..m {
        let val = |k: usize| pop[front[k]].as_ref()[obj];
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(front[a].cmp(&front[b])));
        let (lo, hi) = (val(order[0]), val(order[len - 1]));
        dist[order[0]] = f64::INFINITY;
        dist[order[len - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..len - 1 {
            dist[order[w]] += (val(order[w + 1]) - val(order[w - 1])) / range;
        }
    }
    dist
}

/// Result of [`select_indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Survivor indices: whole fronts in order, then the best-crowded part of
    /// the splitting front.
    pub indices: Vec<usize>,
    /// Front 0 alone was larger than the target size.
    pub front0_truncated: bool,
}

/// Pick `n` indices from objective vectors the NSGA-II way.
pub fn select_indices<V: AsRef<[f64]>>(objs: &[V], n: usize) -> Result<Selection> {
    if objs.len() < n {
        return Err(Error::param(format!(
            "cannot select {n} survivors from {} individuals",
            objs.len()
        )));
    }
    let ranking = non_dominated_sort(objs)?;
    let mut indices = Vec::with_capacity(n);
    for front in &ranking.fronts {
        if indices.len() + front.len() <= n {
            indices.extend_from_slice(front);
            continue;
        }
        let mut rest = front.clone();
        rest.sort_by(|&a, &b| ranking.crowding[b].total_cmp(&ranking.crowding[a]).then(a.cmp(&b)));
        indices.extend_from_slice(&rest[..n - indices.len()]);
        break;
    }
    Ok(Selection {
        indices,
        front0_truncated: ranking.fronts[0].len() > n,
    })
}

fn objectives_of(union: &[Individual]) -> Result<Vec<&ObjectiveVector>> {
    union
        .iter()
        .enumerate()
        .map(|(i, ind)| ind.objectives.as_ref().ok_or(Error::Unevaluated(i)))
        .collect()
}

/// Best `n_pop` individuals of `union` by front, then crowding distance.
pub fn nsga2_select(union: &[Individual], n_pop: usize) -> Result<Vec<Individual>> {
    let objs = objectives_of(union)?;
    let sel = select_indices(&objs, n_pop)?;
    Ok(sel.indices.into_iter().map(|i| union[i].clone()).collect())
}

/// Ranking of an evaluated population.
pub fn rank_population(pop: &[Individual]) -> Result<ParetoRanking> {
    non_dominated_sort(&objectives_of(pop)?)
}

/// Volume dominated by `points` above the origin. Coordinates below zero are
/// clipped to zero.
pub fn hypervolume<V: AsRef<[f64]>>(points: &[V]) -> f64 {
    let pts: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.as_ref().iter().map(|&x| x.max(0.0)).collect())
        .collect();
    match pts.first() {
        None => 0.0,
        Some(p) if p.is_empty() => 0.0,
        Some(p) => hv_slices(pts.clone(), p.len()),
    }
}

// Slice along the last objective and recurse on the remaining ones.
fn hv_slices(mut pts: Vec<Vec<f64>>, m: usize) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    if m == 1 {
        return pts.iter().map(|p| p[0]).fold(0.0, f64::max);
    }
    let last = m - 1;
    pts.sort_by(|a, b| b[last].total_cmp(&a[last]));
    let mut total = 0.0;
    for k in 0..pts.len() {
        let top = pts[k][last];
        let bottom = pts.get(k + 1).map_or(0.0, |p| p[last]);
        let height = top - bottom;
        if height > 0.0 {
            let slice: Vec<Vec<f64>> = pts[..=k].iter().map(|p| p[..last].to_vec()).collect();
            total += height * hv_slices(slice, last);
        }
    }
    total
}
