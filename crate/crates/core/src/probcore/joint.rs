use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Axis};
use super::channel::Channel;
use super::info::entropy_of_masses;
use crate::error::{Error, Result};

/// Entries below this are treated as rounding noise and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-15;
/// Input masses may be off from 1 by at most this much; they are renormalized.
pub const RENORMALIZE_WINDOW: f64 = 1e-9;

/// Dense probability table over the product of named finite alphabets,
/// stored row-major in axis order (last axis varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    mass: Vec<f64>,
}

impl JointDistribution {
    /// Validates and normalizes a flat row-major mass list.
    pub fn build(axes: Vec<Axis>, mass: Vec<f64>) -> Result<Self> {
        for (i, ax) in axes.iter().enumerate() {
            if axes[..i].iter().any(|o| o.name == ax.name) {
                return Err(Error::NameCollision(ax.name.clone()));
            }
        }
        let expected: usize = axes.iter().map(Axis::size).product();
        if mass.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: mass.len(),
            });
        }
        let mut mass = mass;
        for (index, m) in mass.iter_mut().enumerate() {
            if !m.is_finite() || *m < -NEGATIVE_CLAMP {
                return Err(Error::NegativeMass { index, value: *m });
            }
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_WINDOW {
            return Err(Error::NotNormalizable { sum });
        }
        mass.iter_mut().for_each(|m| *m /= sum);
        Ok(Self { axes, mass })
    }

    /// Convenience constructor with `0..n` alphabets.
    pub fn from_sizes(vars: &[(&str, usize)], mass: Vec<f64>) -> Result<Self> {
        let axes = vars
            .iter()
            .map(|(n, s)| Axis::indexed(*n, *s))
            .collect::<Result<Vec<_>>>()?;
        Self::build(axes, mass)
    }

    /// Single-variable distribution.
    pub fn single(name: &str, probs: Vec<f64>) -> Result<Self> {
        Self::from_sizes(&[(name, probs.len())], probs)
    }

    pub fn uniform(name: &str, size: usize) -> Result<Self> {
        Self::single(name, vec![1.0 / size as f64; size])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::size).collect()
    }

    pub fn has(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1].size();
        }
        strides
    }

    /// Multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (i, ax) in self.axes.iter().enumerate().rev() {
            idx[i] = flat % ax.size();
            flat /= ax.size();
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(self.strides())
            .map(|(i, s)| i * s)
            .sum()
    }

    /// Probability of a full assignment given as a multi-index.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.mass[self.flatten(idx)]
    }

    fn indices_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.axis_index(n)).collect()
    }

    /// Masses of the marginal over `keep` (in `keep` order), without
    /// renormalization or validation of disjointness.
    pub(crate) fn marginal_masses(&self, keep: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = keep.iter().map(|&k| self.axes[k].size()).collect();
        let total: usize = sizes.iter().product();
        let mut out = vec![0.0; total];
        let strides = self.strides();
        let mut idx = vec![0usize; self.axes.len()];
        for (flat, &m) in self.mass.iter().enumerate() {
            if m > 0.0 {
                let mut rem = flat;
                for (i, s) in strides.iter().enumerate() {
                    idx[i] = rem / s;
                    rem %= s;
                }
                let mut target = 0;
                for (&k, &sz) in keep.iter().zip(&sizes) {
                    target = target * sz + idx[k];
                }
                out[target] += m;
            }
        }
        out
    }

    /// Sums out every axis not in `keep`; the result has `keep`'s axis order.
    pub fn marginal(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("marginal needs at least one variable".into()));
        }
        let idx = self.indices_of(keep)?;
        for (i, k) in idx.iter().enumerate() {
            if idx[..i].contains(k) {
                return Err(Error::NameCollision(keep[i].to_string()));
            }
        }
        let axes = idx.iter().map(|&k| self.axes[k].clone()).collect();
        let mut mass = self.marginal_masses(&idx);
        let sum: f64 = mass.iter().sum();
        mass.iter_mut().for_each(|m| *m /= sum);
        Ok(Self { axes, mass })
    }

    /// Joint entropy H(vars) in bits. An empty set has entropy 0.
    pub fn entropy_of(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        let idx = self.indices_of(vars)?;
        let mut dedup = idx.clone();
        dedup.sort_unstable();
        dedup.dedup();
        Ok(entropy_of_masses(&self.marginal_masses(&dedup)))
    }

    /// Conditional table p(to | given).
    pub fn conditional(&self, to: &str, given: &[&str]) -> Result<ConditionalTable> {
        if given.contains(&to) {
            return Err(Error::InvalidArgument(format!(
                "`{to}` appears on both sides of the conditioning bar"
            )));
        }
        let to_idx = self.axis_index(to)?;
        let given_idx = self.indices_of(given)?;
        let mut keep = given_idx.clone();
        keep.push(to_idx);
        let joint = self.marginal_masses(&keep);
        let nto = self.axes[to_idx].size();
        let nrows = joint.len() / nto;
        let mut rows = Vec::with_capacity(nrows);
        let mut zero_mass = Vec::with_capacity(nrows);
        for r in 0..nrows {
            let row = &joint[r * nto..(r + 1) * nto];
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                rows.push(row.iter().map(|m| m / s).collect());
                zero_mass.push(false);
            } else {
                rows.push(vec![1.0 / nto as f64; nto]);
                zero_mass.push(true);
            }
        }
        Ok(ConditionalTable {
            given: given_idx.iter().map(|&g| self.axes[g].clone()).collect(),
            to: self.axes[to_idx].clone(),
            rows,
            zero_mass,
        })
    }

    /// Extends the joint with `ch.to` drawn through `ch` from `parent`, so the
    /// new variable is conditionally independent of everything else given
    /// the parent.
    pub fn attach_channel(&self, ch: &Channel, parent: &str) -> Result<Self> {
        let p = self.axis_index(parent)?;
        if self.has(&ch.to().name) {
            return Err(Error::NameCollision(ch.to().name.clone()));
        }
        if ch.from().size() != self.axes[p].size() {
            return Err(Error::AlphabetMismatch(format!(
                "channel input has {} symbols, `{parent}` has {}",
                ch.from().size(),
                self.axes[p].size()
            )));
        }
        let nto = ch.to().size();
        let stride_p: usize = self.axes[p + 1..].iter().map(Axis::size).product();
        let np = self.axes[p].size();
        let mut mass = Vec::with_capacity(self.mass.len() * nto);
        for (flat, &m) in self.mass.iter().enumerate() {
            let pv = (flat / stride_p) % np;
            mass.extend(ch.row(pv).iter().map(|w| m * w));
        }
        let mut axes = self.axes.clone();
        axes.push(ch.to().clone());
        Ok(Self { axes, mass })
    }

    /// Independent product of two joints with disjoint variable names.
    pub fn product(&self, other: &Self) -> Result<Self> {
        for ax in &other.axes {
            if self.has(&ax.name) {
                return Err(Error::NameCollision(ax.name.clone()));
            }
        }
        let mut mass = Vec::with_capacity(self.mass.len() * other.mass.len());
        for &m in &self.mass {
            mass.extend(other.mass.iter().map(|w| m * w));
        }
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        Ok(Self { axes, mass })
    }

    /// Renames a variable, keeping its alphabet.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let i = self.axis_index(from)?;
        if from != to && self.has(to) {
            return Err(Error::NameCollision(to.to_string()));
        }
        let mut out = self.clone();
        out.axes[i].name = to.to_string();
        Ok(out)
    }

    /// Same distribution with axes reordered to `order` (a permutation of the
    /// current names).
    pub fn reorder(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                actual: order.len(),
            });
        }
        self.marginal(order)
    }

    /// Alphabet of a variable.
    pub fn alphabet(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.axis(name)?.alphabet)
    }
}

/// p(to | given) with one row per assignment of the conditioning variables
/// (row-major over `given`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    pub given: Vec<Axis>,
    pub to: Axis,
    pub rows: Vec<Vec<f64>>,
    /// Rows whose conditioning event has zero probability; those rows are uniform.
    pub zero_mass: Vec<bool>,
}

impl ConditionalTable {
    /// Converts a table with a single conditioning variable into a channel.
    pub fn into_channel(self) -> Result<Channel> {
        if self.given.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: self.given.len(),
            });
        }
        let from = self.given.into_iter().next().unwrap();
        Channel::new(from, self.to, self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dsbs(p: f64) -> JointDistribution {
        JointDistribution::from_sizes(
            &[("A", 2), ("C", 2)],
            vec![0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)],
        )
        .unwrap()
    }

    #[test]
    fn build_examples() {
        let u = JointDistribution::from_sizes(&[("A", 2)], vec![0.5, 0.5]).unwrap();
        assert_eq!(u.mass(), &[0.5, 0.5]);
        let d = dsbs(0.1);
        assert_eq!(d.mass(), &[0.45, 0.05, 0.05, 0.45]);
        assert!(matches!(
            JointDistribution::from_sizes(&[("A", 2)], vec![0.5, 0.6]),
            Err(Error::NotNormalizable { .. })
        ));
        assert!(matches!(
            JointDistribution::from_sizes(&[("A", 2)], vec![0.5]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
        assert!(matches!(
            JointDistribution::from_sizes(&[("A", 2)], vec![1.0 + 1e-3, -1e-3]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        // tiny negatives clamp, tiny deficits renormalize
        let j = JointDistribution::from_sizes(&[("A", 2)], vec![1.0 - 1e-10, -1e-16]).unwrap();
        assert_eq!(j.mass(), &[1.0, 0.0]);
        assert!(JointDistribution::from_sizes(&[("A", 2), ("A", 1)], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn marginal_examples() {
        let d = dsbs(0.1);
        let a = d.marginal(&["A"]).unwrap();
        assert!((a.mass()[0] - 0.5).abs() < 1e-15);
        assert_eq!(d.marginal(&["A", "C"]).unwrap(), d);
        assert!(matches!(d.marginal(&["Z"]), Err(Error::UnknownVariable(_))));

        let ace = JointDistribution::from_sizes(
            &[("A", 2), ("C", 2), ("E", 2)],
            vec![0.1, 0.05, 0.2, 0.15, 0.0, 0.25, 0.05, 0.2],
        )
        .unwrap();
        let ae = ace.marginal(&["A", "E"]).unwrap();
        // brute force: p(a,e) = sum_c p(a,c,e)
        for a in 0..2 {
            for e in 0..2 {
                let want: f64 = (0..2).map(|c| ace.prob(&[a, c, e])).sum();
                assert!((ae.prob(&[a, e]) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conditional_examples() {
        let bsc = dsbs(0.1).conditional("C", &["A"]).unwrap();
        for (r, want) in bsc.rows.iter().zip([[0.9, 0.1], [0.1, 0.9]]) {
            assert!((r[0] - want[0]).abs() < 1e-15 && (r[1] - want[1]).abs() < 1e-15);
        }
        let ind = JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.12, 0.28, 0.18, 0.42])
            .unwrap();
        let t = ind.conditional("C", &["A"]).unwrap();
        for r in &t.rows {
            assert!((r[0] - 0.3).abs() < 1e-12);
        }
        let deg = JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.4, 0.6, 0.0, 0.0])
            .unwrap();
        let t = deg.conditional("C", &["A"]).unwrap();
        assert_eq!(t.zero_mass, vec![false, true]);
        assert_eq!(t.rows[1], vec![0.5, 0.5]);
    }

    #[test]
    fn attach_bsc_marginal_crossover() {
        let ace = JointDistribution::from_sizes(
            &[("A", 2), ("C", 2), ("E", 2)],
            vec![0.1, 0.05, 0.2, 0.15, 0.0, 0.25, 0.05, 0.2],
        )
        .unwrap();
        let ch = Channel::bsc("A", "U", 0.3).unwrap();
        let ext = ace.attach_channel(&ch, "A").unwrap();
        assert_eq!(ext.names(), vec!["A", "C", "E", "U"]);
        let t = ext.conditional("U", &["A"]).unwrap();
        assert!((t.rows[0][1] - 0.3).abs() < 1e-15);
        assert!((t.rows[1][0] - 0.3).abs() < 1e-15);
        assert!(matches!(
            ext.attach_channel(&ch, "A"),
            Err(Error::NameCollision(_))
        ));
    }
}
