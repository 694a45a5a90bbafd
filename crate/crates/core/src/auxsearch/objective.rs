//! Equivocation brackets as functions of p(u|a).
//!
//! With U - A - (B, E),
//!   I(A;B|U) - I(A;E|U) = H(B|U) - H(E|U) - H(B|A) + H(E|A),
//! and each H(.|U) only needs the posteriors p(a|u). Evaluation therefore
//! costs O(|U| |A| (|B| + |E|)) and never builds the extended joint.

use crate::error::{Error, Result};
use crate::probcore::{entropy_of_masses, JointDistribution};

/// Anything the U search can maximize.
pub trait UObjective {
    fn alphabet_a(&self) -> usize;
    /// Objective at the row-stochastic `u_rows[a][u]`.
    fn value(&self, u_rows: &[Vec<f64>]) -> f64;
}

/// I(A;B|U) - I(A;E|U) for fixed p(a), p(b|a), p(e|a).
#[derive(Debug, Clone)]
pub struct Bracket {
    p_a: Vec<f64>,
    b_given_a: Vec<Vec<f64>>,
    e_given_a: Vec<Vec<f64>>,
    offset: f64,
}

impl Bracket {
    pub fn new(p_a: Vec<f64>, b_given_a: Vec<Vec<f64>>, e_given_a: Vec<Vec<f64>>) -> Result<Self> {
        let na = p_a.len();
        if b_given_a.len() != na || e_given_a.len() != na {
            return Err(Error::DimensionMismatch {
                expected: na,
                actual: b_given_a.len().min(e_given_a.len()),
            });
        }
        let h_b_a: f64 = p_a
            .iter()
            .zip(&b_given_a)
            .map(|(p, r)| p * entropy_of_masses(r))
            .sum();
        let h_e_a: f64 = p_a
            .iter()
            .zip(&e_given_a)
            .map(|(p, r)| p * entropy_of_masses(r))
            .sum();
        Ok(Self {
            p_a,
            b_given_a,
            e_given_a,
            offset: h_e_a - h_b_a,
        })
    }

    /// Reads p(a), p(b|a), p(e|a) from a joint. `e = None` means Eve has no
    /// side information.
    pub fn from_joint(j: &JointDistribution, a: &str, b: &str, e: Option<&str>) -> Result<Self> {
        let p_a = j.marginal(&[a])?.mass().to_vec();
        let b_rows = j.conditional(b, &[a])?.rows;
        let e_rows = match e {
            Some(e) => j.conditional(e, &[a])?.rows,
            None => vec![vec![1.0]; p_a.len()],
        };
        Self::new(p_a, b_rows, e_rows)
    }

    /// Same channels under a different prior on A.
    pub fn with_prior(&self, p_a: &[f64]) -> Result<Self> {
        Self::new(p_a.to_vec(), self.b_given_a.clone(), self.e_given_a.clone())
    }

    /// H(B|U) - H(E|U) for the given channel.
    fn conditional_gap(&self, u_rows: &[Vec<f64>]) -> f64 {
        let nu = u_rows.first().map_or(0, Vec::len);
        let nb = self.b_given_a[0].len();
        let ne = self.e_given_a[0].len();
        let mut pb = vec![0.0; nb];
        let mut pe = vec![0.0; ne];
        let mut total = 0.0;
        for u in 0..nu {
            pb.iter_mut().for_each(|x| *x = 0.0);
            pe.iter_mut().for_each(|x| *x = 0.0);
            let mut pu = 0.0;
            for (a, &pa) in self.p_a.iter().enumerate() {
                let w = pa * u_rows[a][u];
                if w > 0.0 {
                    pu += w;
                    for (acc, &q) in pb.iter_mut().zip(&self.b_given_a[a]) {
                        *acc += w * q;
                    }
                    for (acc, &q) in pe.iter_mut().zip(&self.e_given_a[a]) {
                        *acc += w * q;
                    }
                }
            }
            if pu > 0.0 {
                // sum_b p(u,b) log p(u,b)/p(u) = p(u) H(B|U=u) after scaling
                total += entropy_scaled(&pb, pu) - entropy_scaled(&pe, pu);
            }
        }
        total
    }
}

/// p(u) H(X | U = u) from unnormalized masses p(u, x).
fn entropy_scaled(masses: &[f64], pu: f64) -> f64 {
    masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * (m / pu).log2())
        .sum()
}

impl UObjective for Bracket {
    fn alphabet_a(&self) -> usize {
        self.p_a.len()
    }

    fn value(&self, u_rows: &[Vec<f64>]) -> f64 {
        self.conditional_gap(u_rows) + self.offset
    }
}

/// min_k w_k * bracket_k: one shared U serving several eavesdroppers.
#[derive(Debug, Clone)]
pub struct WeightedMinBracket {
    parts: Vec<(f64, Bracket)>,
}

impl WeightedMinBracket {
    pub fn new(parts: Vec<(f64, Bracket)>) -> Result<Self> {
        let na = parts
            .first()
            .map(|(_, b)| b.alphabet_a())
            .ok_or_else(|| Error::InvalidArgument("no brackets to combine".into()))?;
        if parts.iter().any(|(w, b)| b.alphabet_a() != na || !(*w > 0.0)) {
            return Err(Error::InvalidArgument(
                "brackets must share A and carry positive weights".into(),
            ));
        }
        Ok(Self { parts })
    }
}

impl UObjective for WeightedMinBracket {
    fn alphabet_a(&self) -> usize {
        self.parts[0].1.alphabet_a()
    }

    fn value(&self, u_rows: &[Vec<f64>]) -> f64 {
        self.parts
            .iter()
            .map(|(w, b)| w * b.value(u_rows))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::Channel;

    #[test]
    fn constant_u_gives_unconditional_bracket() {
        let j = JointDistribution::from_sizes(
            &[("A", 2), ("B", 2), ("E", 2)],
            vec![0.2, 0.1, 0.05, 0.15, 0.05, 0.1, 0.25, 0.1],
        )
        .unwrap();
        let br = Bracket::from_joint(&j, "A", "B", Some("E")).unwrap();
        let want = j.mi(&["A"], &["B"], &[]).unwrap() - j.mi(&["A"], &["E"], &[]).unwrap();
        assert!((br.value(&[vec![1.0], vec![1.0]]) - want).abs() < 1e-12);
    }

    #[test]
    fn matches_extended_joint_route() {
        let j = JointDistribution::from_sizes(
            &[("A", 3), ("B", 2), ("E", 2)],
            vec![0.1, 0.05, 0.02, 0.08, 0.2, 0.1, 0.05, 0.05, 0.1, 0.1, 0.05, 0.1],
        )
        .unwrap();
        let rows = vec![vec![0.2, 0.5, 0.3], vec![0.7, 0.1, 0.2], vec![0.0, 0.4, 0.6]];
        let ch = Channel::from_rows("A", "U", rows.clone()).unwrap();
        let ext = j.attach_channel(&ch, "A").unwrap();
        let want = ext.mi(&["A"], &["B"], &["U"]).unwrap() - ext.mi(&["A"], &["E"], &["U"]).unwrap();
        let br = Bracket::from_joint(&j, "A", "B", Some("E")).unwrap();
        assert!((br.value(&rows) - want).abs() < 1e-12);
    }
}
