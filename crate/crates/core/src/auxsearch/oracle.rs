//! Exhaustive grid over p(U|A), used to bound the optimality gap of the
//! randomized search.

use super::objective::{Bracket, UObjective};
use super::search::AuxChannelU;
use crate::error::{Error, Result};
use crate::probcore::{positive_part, JointDistribution};
use crate::vars::{A, B, E};

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub u: AuxChannelU,
    pub delta: f64,
    pub points: u64,
}

/// All vectors of `parts` nonnegative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Grid maximum of [I(A;B|U) - I(A;E|U)]^+ with every row of p(U|A) on the
/// simplex lattice of step `resolution`. Deterministic; first maximizer in
/// lattice order wins.
pub fn oracle_grid_u(j_abe: &JointDistribution, card_u: usize, resolution: f64) -> Result<GridOptimum> {
    let na = j_abe.axis(A)?.size();
    if na > 3 {
        return Err(Error::AlphabetTooLarge {
            what: "A".into(),
            size: na,
            limit: 3,
        });
    }
    if card_u > 3 || card_u == 0 {
        return Err(Error::AlphabetTooLarge {
            what: "U".into(),
            size: card_u,
            limit: 3,
        });
    }
    if !(0.05 - 1e-12..=0.5).contains(&resolution) {
        return Err(Error::InvalidArgument(format!(
            "oracle resolution {resolution} outside [0.05, 0.5]"
        )));
    }
    let steps = (1.0 / resolution).round() as usize;
    if ((steps as f64) * resolution - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "oracle resolution {resolution} does not divide 1"
        )));
    }
    let e = j_abe.has(E).then_some(E);
    let objective = Bracket::from_joint(j_abe, A, B, e)?;
    let row_choices: Vec<Vec<f64>> = compositions(steps, card_u)
        .into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / steps as f64).collect())
        .collect();

    let mut idx = vec![0usize; na];
    let mut rows: Vec<Vec<f64>> = vec![row_choices[0].clone(); na];
    let mut best_rows = rows.clone();
    let mut best = f64::NEG_INFINITY;
    let mut points = 0u64;
    loop {
        points += 1;
        let v = objective.value(&rows);
        if v > best {
            best = v;
            best_rows = rows.clone();
        }
        // odometer over rows
        let mut k = 0;
        loop {
            if k == na {
                let u = AuxChannelU::from_rows(best_rows)?;
                return Ok(GridOptimum {
                    u,
                    delta: positive_part(best),
                    points,
                });
            }
            idx[k] += 1;
            if idx[k] < row_choices.len() {
                rows[k] = row_choices[idx[k]].clone();
                break;
            }
            idx[k] = 0;
            rows[k] = row_choices[0].clone();
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::Channel;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(20, 3).len(), 231);
        assert_eq!(compositions(4, 1), vec![vec![4]]);
    }

    #[test]
    fn single_symbol_u_is_exact() {
        let j = JointDistribution::from_sizes(
            &[("A", 2), ("B", 2), ("E", 2)],
            vec![0.3, 0.05, 0.1, 0.05, 0.02, 0.18, 0.1, 0.2],
        )
        .unwrap();
        let g = oracle_grid_u(&j, 1, 0.05).unwrap();
        let want = (j.mi(&["A"], &["B"], &[]).unwrap() - j.mi(&["A"], &["E"], &[]).unwrap()).max(0.0);
        assert!((g.delta - want).abs() < 1e-12);
        assert_eq!(g.points, 1);
    }

    #[test]
    fn identical_side_information() {
        let j = JointDistribution::uniform("A", 2)
            .unwrap()
            .attach_channel(&Channel::bsc("A", "B", 0.3).unwrap(), "A")
            .unwrap()
            .attach_channel(&Channel::identity("B", "E", 2).unwrap(), "B")
            .unwrap();
        assert!(oracle_grid_u(&j, 2, 0.1).unwrap().delta.abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let j = JointDistribution::from_sizes(&[("A", 4), ("B", 1)], vec![0.25; 4]).unwrap();
        assert!(matches!(oracle_grid_u(&j, 2, 0.1), Err(Error::AlphabetTooLarge { .. })));
        let j = JointDistribution::from_sizes(&[("A", 2), ("B", 1)], vec![0.5; 2]).unwrap();
        assert!(oracle_grid_u(&j, 4, 0.1).is_err());
        assert!(oracle_grid_u(&j, 2, 0.01).is_err());
        assert!(oracle_grid_u(&j, 2, 0.3).is_err());
    }
}
