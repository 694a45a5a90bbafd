//! Entropies and mutual informations in bits.
//!
//! Every measure reduces to joint entropies of marginals; conditional
//! quantities are differences of those, with 0 log 0 = 0.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::joint::JointDistribution;
use crate::error::{Error, Result};

/// Tolerance under which tiny negative differences are rounding noise.
pub const CLAMP_TOL: f64 = 1e-12;

/// -sum p log2 p over a mass vector.
pub fn entropy_of_masses(masses: &[f64]) -> f64 {
    let h: f64 = masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Binary entropy function.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_masses(&[p, 1.0 - p])
}

/// `[x]^+`
pub fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

/// An information measure over named variables of a joint distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfoQuery {
    /// H(target | given)
    Entropy {
        target: Vec<String>,
        given: Vec<String>,
    },
    /// I(x ; y | given)
    Mutual {
        x: Vec<String>,
        y: Vec<String>,
        given: Vec<String>,
    },
}

impl InfoQuery {
    pub fn entropy(target: &[&str], given: &[&str]) -> Self {
        InfoQuery::Entropy {
            target: owned(target),
            given: owned(given),
        }
    }

    pub fn mutual(x: &[&str], y: &[&str], given: &[&str]) -> Self {
        InfoQuery::Mutual {
            x: owned(x),
            y: owned(y),
            given: owned(given),
        }
    }

    /// Conventional label such as `H(A|C)` or `I(A;B|E)`.
    pub fn label(&self) -> String {
        let given = |g: &Vec<String>| {
            if g.is_empty() {
                String::new()
            } else {
                format!("|{}", g.join(","))
            }
        };
        match self {
            InfoQuery::Entropy { target, given: g } => format!("H({}{})", target.join(","), given(g)),
            InfoQuery::Mutual { x, y, given: g } => {
                format!("I({};{}{})", x.join(","), y.join(","), given(g))
            }
        }
    }

    fn validate(&self, j: &JointDistribution) -> Result<()> {
        let (lhs, given): (Vec<&Vec<String>>, &Vec<String>) = match self {
            InfoQuery::Entropy { target, given } => (vec![target], given),
            InfoQuery::Mutual { x, y, given } => (vec![x, y], given),
        };
        for part in lhs.iter().copied().chain(std::iter::once(given)) {
            for n in part {
                j.axis_index(n)?;
            }
        }
        let given_set: BTreeSet<&String> = given.iter().collect();
        for part in &lhs {
            if part.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "{}: empty target set",
                    self.label()
                )));
            }
            if part.iter().any(|n| given_set.contains(n)) {
                return Err(Error::InvalidArgument(format!(
                    "{}: target and conditioning sets overlap",
                    self.label()
                )));
            }
        }
        Ok(())
    }
}

fn owned(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    let mut out: Vec<&str> = a.to_vec();
    for n in b {
        if !out.contains(n) {
            out.push(n);
        }
    }
    out
}

impl JointDistribution {
    /// Evaluates a query in bits; the result is never negative.
    pub fn info_measure(&self, q: &InfoQuery) -> Result<f64> {
        q.validate(self)?;
        fn refs(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        match q {
            InfoQuery::Entropy { target, given } => self.h(&refs(target), &refs(given)),
            InfoQuery::Mutual { x, y, given } => self.mi(&refs(x), &refs(y), &refs(given)),
        }
    }

    /// H(target | given) = H(target, given) - H(given).
    pub fn h(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        let all = union(target, given);
        let d = self.entropy_of(&all)? - self.entropy_of(given)?;
        Ok(d.max(0.0))
    }

    /// I(x ; y | given) = H(x | given) - H(x | y, given).
    pub fn mi(&self, x: &[&str], y: &[&str], given: &[&str]) -> Result<f64> {
        let xg = union(x, given);
        let yg = union(y, given);
        let xyg = union(&xg, y);
        let d = self.entropy_of(&xg)? + self.entropy_of(&yg)?
            - self.entropy_of(&xyg)?
            - self.entropy_of(given)?;
        Ok(d.max(0.0))
    }

    /// I(X ; Z | Y): zero exactly when X - Y - Z is a Markov chain.
    pub fn markov_residual(&self, x: &[&str], y: &[&str], z: &[&str]) -> Result<f64> {
        for set in [x, y, z] {
            if set.is_empty() {
                return Err(Error::InvalidArgument("Markov chain with an empty set".into()));
            }
            for n in set {
                self.axis_index(n)?;
            }
        }
        let mut seen = BTreeSet::new();
        for n in x.iter().chain(y).chain(z) {
            if !seen.insert(*n) {
                return Err(Error::InvalidArgument(format!(
                    "`{n}` appears twice in a Markov chain"
                )));
            }
        }
        self.mi(x, z, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::Channel;

    #[test]
    fn measure_examples() {
        let a = JointDistribution::uniform("A", 2).unwrap();
        assert!((a.info_measure(&InfoQuery::entropy(&["A"], &[])).unwrap() - 1.0).abs() < 1e-15);
        let skew = JointDistribution::single("A", vec![0.25, 0.75]).unwrap();
        assert!((skew.h(&["A"], &[]).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);

        let dsbs =
            JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.45, 0.05, 0.05, 0.45])
                .unwrap();
        let i = dsbs.info_measure(&InfoQuery::mutual(&["A"], &["C"], &[])).unwrap();
        assert!((i - (1.0 - binary_entropy(0.1))).abs() < 1e-12);
        assert!((i - 0.531004).abs() < 1e-6);
    }

    #[test]
    fn query_validation() {
        let a = JointDistribution::uniform("A", 2).unwrap();
        assert!(matches!(
            a.info_measure(&InfoQuery::entropy(&["B"], &[])),
            Err(Error::UnknownVariable(_))
        ));
        assert!(a.info_measure(&InfoQuery::entropy(&["A"], &["A"])).is_err());
        assert!(a.info_measure(&InfoQuery::entropy(&[], &[])).is_err());
        assert_eq!(InfoQuery::mutual(&["A"], &["B"], &["E"]).label(), "I(A;B|E)");
    }

    #[test]
    fn markov_examples() {
        let a = JointDistribution::uniform("A", 2).unwrap();
        let j = a
            .attach_channel(&Channel::bsc("A", "B", 0.1).unwrap(), "A")
            .unwrap()
            .attach_channel(&Channel::bsc("B", "E", 0.2).unwrap(), "B")
            .unwrap();
        assert!(j.markov_residual(&["A"], &["B"], &["E"]).unwrap() < 1e-12);

        // E = A, B independent
        let j = a
            .attach_channel(&Channel::identity("A", "E", 2).unwrap(), "A")
            .unwrap()
            .product(&JointDistribution::single("B", vec![0.3, 0.7]).unwrap())
            .unwrap();
        assert!((j.markov_residual(&["A"], &["B"], &["E"]).unwrap() - 1.0).abs() < 1e-12);

        let k = j.product(&JointDistribution::single("Z", vec![1.0]).unwrap()).unwrap();
        assert!(k.markov_residual(&["A"], &["E"], &["Z"]).unwrap() < 1e-15);
        assert!(k.markov_residual(&["A"], &["A"], &["Z"]).is_err());
    }

    #[test]
    fn attach_copy_and_constant() {
        let ace = JointDistribution::from_sizes(
            &[("A", 2), ("C", 2), ("E", 2)],
            vec![0.1, 0.05, 0.2, 0.15, 0.0, 0.25, 0.05, 0.2],
        )
        .unwrap();
        let copy = ace.attach_channel(&Channel::identity("A", "U", 2).unwrap(), "A").unwrap();
        assert!(copy.mi(&["U"], &["C", "E"], &["A"]).unwrap() < 1e-12);
        assert!((copy.h(&["U"], &[]).unwrap() - copy.h(&["A"], &[]).unwrap()).abs() < 1e-12);
        let cst = ace.attach_channel(&Channel::constant("A", "U", 2).unwrap(), "A").unwrap();
        assert!(cst.mi(&["U"], &["A", "C", "E"], &[]).unwrap() < 1e-15);
    }
}
