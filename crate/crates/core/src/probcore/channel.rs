use serde::{Deserialize, Serialize};

use super::alphabet::Axis;
use crate::error::{Error, Result};

/// Row-stochastic tolerance.
pub const ROW_TOL: f64 = 1e-12;

/// A stochastic matrix p(to | from).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    from: Axis,
    to: Axis,
    matrix: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(from: Axis, to: Axis, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.len() != from.size() {
            return Err(Error::DimensionMismatch {
                expected: from.size(),
                actual: matrix.len(),
            });
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != to.size() {
                return Err(Error::DimensionMismatch {
                    expected: to.size(),
                    actual: r.len(),
                });
            }
            let sum: f64 = r.iter().sum();
            if r.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) || (sum - 1.0).abs() > ROW_TOL {
                return Err(Error::NotStochastic { row, sum });
            }
        }
        Ok(Self { from, to, matrix })
    }

    /// Channel between `0..n` alphabets.
    pub fn from_rows(from: &str, to: &str, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let nf = matrix.len();
        let nt = matrix.first().map_or(0, Vec::len);
        Self::new(Axis::indexed(from, nf)?, Axis::indexed(to, nt)?, matrix)
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(from: &str, to: &str, p: f64) -> Result<Self> {
        Self::from_rows(from, to, vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn identity(from: &str, to: &str, size: usize) -> Result<Self> {
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(from, to, rows)
    }

    /// Single-output channel: the output carries no information.
    pub fn constant(from: &str, to: &str, from_size: usize) -> Result<Self> {
        Self::from_rows(from, to, vec![vec![1.0]; from_size])
    }

    /// Deterministic channel x -> map[x].
    pub fn deterministic(from: &str, to: &str, map: &[usize], to_size: usize) -> Result<Self> {
        let rows = map
            .iter()
            .map(|&t| (0..to_size).map(|j| if j == t { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(Axis::indexed(from, map.len())?, Axis::indexed(to, to_size)?, rows)
    }

    pub fn from(&self) -> &Axis {
        &self.from
    }

    pub fn to(&self) -> &Axis {
        &self.to
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i]
    }

    /// The cascade `self` followed by `next`: p(z|x) = sum_y p(y|x) p(z|y).
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if next.from.size() != self.to.size() {
            return Err(Error::AlphabetMismatch(format!(
                "cannot feed {} symbols into a channel expecting {}",
                self.to.size(),
                next.from.size()
            )));
        }
        let matrix = self
            .matrix
            .iter()
            .map(|r| {
                (0..next.to.size())
                    .map(|z| r.iter().zip(&next.matrix).map(|(w, nr)| w * nr[z]).sum())
                    .collect::<Vec<f64>>()
            })
            .map(renormalize)
            .collect();
        Channel::new(self.from.clone(), next.to.clone(), matrix)
    }

    /// Same matrix with renamed endpoints.
    pub fn relabel(&self, from: &str, to: &str) -> Channel {
        let mut c = self.clone();
        c.from.name = from.to_string();
        c.to.name = to.to_string();
        c
    }

    /// Largest entrywise difference to another channel of the same shape.
    pub fn max_abs_diff(&self, other: &Channel) -> f64 {
        self.matrix
            .iter()
            .zip(&other.matrix)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn renormalize(mut row: Vec<f64>) -> Vec<f64> {
    row.iter_mut().for_each(|w| {
        if *w < 0.0 {
            *w = 0.0
        }
    });
    let s: f64 = row.iter().sum();
    if s > 0.0 {
        row.iter_mut().for_each(|w| *w /= s);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsc_cascade_crossover() {
        let a = Channel::bsc("A", "B", 0.1).unwrap();
        let b = Channel::bsc("B", "E", 0.1).unwrap();
        let c = a.then(&b).unwrap();
        assert!((c.row(0)[1] - 0.18).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Channel::from_rows("A", "B", vec![vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(Channel::from_rows("A", "B", vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
    }
}
