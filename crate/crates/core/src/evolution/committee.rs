use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genotype::{Individual, Label};

fn anomaly() -> Label {
    Label::Anomaly
}

/// Most accurate slice of a final population, classifying by majority vote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Committee {
    pub members: Vec<Individual>,
    /// Verdict on an exact tie.
    #[serde(default = "anomaly")]
    pub tie: Label,
}

impl Committee {
    pub fn new(members: Vec<Individual>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        Ok(Self {
            members,
            tie: Label::Anomaly,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `(anomaly, normal)` vote counts for `point`.
    pub fn votes(&self, point: &[f64]) -> Result<(usize, usize)> {
        let mut anomaly = 0;
        for m in &self.members {
            if m.classify(point)?.is_anomaly() {
                anomaly += 1;
            }
        }
        Ok((anomaly, self.members.len() - anomaly))
    }

    pub fn classify(&self, point: &[f64]) -> Result<Label> {
        committee_classify(self, point)
    }
}

/// Committee size for a population of `n`: `max(1, round(rho n))`.
pub fn committee_size(n: usize, rho: f64) -> usize {
    ((rho * n as f64).round() as usize).clamp(1, n.max(1))
}

/// The `max(1, round(rho |pop|))` most accurate individuals, ties broken by
/// lower index.
pub fn committee_select(pop: &[Individual], rho: f64) -> Result<Committee> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::param(format!("committee fraction {rho} outside (0, 1]")));
    }
    let acc = pop
        .iter()
        .enumerate()
        .map(|(i, ind)| ind.accuracy.ok_or(Error::Unevaluated(i)))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| acc[b].total_cmp(&acc[a]).then(a.cmp(&b)));
    let k = committee_size(pop.len(), rho);
    Committee::new(order[..k].iter().map(|&i| pop[i].clone()).collect())
}

/// Majority vote of the members; an exact tie returns `c.tie`.
pub fn committee_classify(c: &Committee, point: &[f64]) -> Result<Label> {
    let (anomaly, normal) = c.votes(point)?;
    Ok(match anomaly.cmp(&normal) {
        std::cmp::Ordering::Greater => Label::Anomaly,
        std::cmp::Ordering::Less => Label::Normal,
        std::cmp::Ordering::Equal => c.tie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::{random_individual, Site};
    use crate::geometry::BoundingBox;

    fn constant(label: Label, acc: f64) -> Individual {
        let mut ind = Individual::new(vec![Site {
            coords: vec![0.0, 0.0],
            sigmas: vec![0.1, 0.1],
            label,
        }]);
        ind.accuracy = Some(acc);
        ind
    }

    #[test]
    fn selection_sizes_and_order() {
        let pop: Vec<Individual> = (0..100).map(|i| constant(Label::Normal, (i % 7) as f64 / 7.0)).collect();
        let c = committee_select(&pop, 0.05).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.members.iter().all(|m| m.accuracy == Some(6.0 / 7.0)));
        assert_eq!(committee_select(&pop, 1.0).unwrap().len(), 100);
        let one = committee_select(&pop, 0.001).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.members[0], pop[6]);
        assert!(committee_select(&pop, 0.0).is_err());
        assert!(committee_select(&[], 0.5).is_err());
        assert!(matches!(
            committee_select(&[Individual::new(vec![])], 0.5),
            Err(Error::Unevaluated(0))
        ));
    }

    #[test]
    fn votes_and_ties() {
        let c = Committee::new(vec![
            constant(Label::Anomaly, 1.0),
            constant(Label::Anomaly, 1.0),
            constant(Label::Normal, 1.0),
        ])
        .unwrap();
        assert_eq!(c.classify(&[3.0, 3.0]).unwrap(), Label::Anomaly);
        let tie = Committee::new(vec![constant(Label::Anomaly, 1.0), constant(Label::Normal, 1.0)]).unwrap();
        assert_eq!(tie.classify(&[0.0, 0.0]).unwrap(), Label::Anomaly);
        let mut tie_normal = tie.clone();
        tie_normal.tie = Label::Normal;
        assert_eq!(tie_normal.classify(&[0.0, 0.0]).unwrap(), Label::Normal);
    }

    #[test]
    fn vote_counting_oracle_on_grid() {
        let b = BoundingBox::unit(2);
        let members: Vec<Individual> = (0..5).map(|s| random_individual(2, 10, 20, &b, s).unwrap()).collect();
        let c = Committee::new(members.clone()).unwrap();
        let single = Committee::new(vec![members[0].clone()]).unwrap();
        for gx in 0..20 {
            for gy in 0..10 {
                let p = [gx as f64 / 19.0, gy as f64 / 9.0];
                let a = members.iter().filter(|m| m.classify(&p).unwrap() == Label::Anomaly).count();
                let expected = if 2 * a >= 5 { Label::Anomaly } else { Label::Normal };
                assert_eq!(c.classify(&p).unwrap(), expected);
                assert_eq!(single.classify(&p).unwrap(), members[0].classify(&p).unwrap());
            }
        }
    }
}
