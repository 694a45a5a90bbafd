//! Stochastic degradedness as a linear feasibility problem.
//!
//! E is a degraded version of B (both observed through channels from A) when
//! some row-stochastic M satisfies p(e|a) = sum_b p(b|a) M(e|b). We minimize
//! the largest entrywise residual over M with an LP and then replay the
//! clamped, renormalized witness to report the residual it actually achieves.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::channel::{renormalize, Channel};
use crate::error::{Error, Result};

/// Residual under which the pair is declared degraded.
pub const DEGRADED_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct DegradednessVerdict {
    pub feasible: bool,
    /// max_{a,e} |(P_B M)(e|a) - P_E(e|a)| for the best M found.
    pub residual: f64,
    /// Degrading map p(e|b), present when feasible.
    pub witness: Option<Channel>,
}

/// Tests whether `ch_e` = `ch_b` followed by some stochastic map.
pub fn degradedness_test(ch_b: &Channel, ch_e: &Channel) -> Result<DegradednessVerdict> {
    let na = ch_b.from().size();
    if ch_e.from().size() != na || ch_b.from().alphabet.symbols() != ch_e.from().alphabet.symbols() {
        return Err(Error::AlphabetMismatch(format!(
            "p({}|{}) and p({}|{}) have different input alphabets",
            ch_b.to().name,
            ch_b.from().name,
            ch_e.to().name,
            ch_e.from().name
        )));
    }
    let nb = ch_b.to().size();
    let ne = ch_e.to().size();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let m: Vec<Vec<_>> = (0..nb)
        .map(|_| (0..ne).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect())
        .collect();
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    for row in &m {
        let expr: Vec<_> = row.iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, 1.0);
    }
    for a in 0..na {
        let pb = ch_b.row(a);
        for e in 0..ne {
            let target = ch_e.row(a)[e];
            let mut upper: Vec<_> = (0..nb).map(|b| (m[b][e], pb[b])).collect();
            upper.push((t, -1.0));
            lp.add_constraint(upper.as_slice(), ComparisonOp::Le, target);
            let mut lower: Vec<_> = (0..nb).map(|b| (m[b][e], pb[b])).collect();
            lower.push((t, 1.0));
            lp.add_constraint(lower.as_slice(), ComparisonOp::Ge, target);
        }
    }
    let solution = lp
        .solve()
        .map_err(|e| Error::InvariantViolation(format!("degradedness LP failed: {e}")))?;

    let rows: Vec<Vec<f64>> = m
        .iter()
        .map(|row| renormalize(row.iter().map(|&v| solution[v]).collect()))
        .map(|r| {
            if r.iter().sum::<f64>() > 0.0 {
                r
            } else {
                vec![1.0 / ne as f64; ne]
            }
        })
        .collect();
    let witness = Channel::new(ch_b.to().clone(), ch_e.to().clone(), rows)?;
    let residual = replay_residual(ch_b, &witness, ch_e);
    let feasible = residual <= DEGRADED_TOL;
    Ok(DegradednessVerdict {
        feasible,
        residual,
        witness: feasible.then_some(witness),
    })
}

/// Entrywise max |p_B M - p_E|.
pub fn replay_residual(ch_b: &Channel, witness: &Channel, ch_e: &Channel) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..ch_b.from().size() {
        for e in 0..ch_e.to().size() {
            let composed: f64 = ch_b
                .row(a)
                .iter()
                .zip(witness.matrix())
                .map(|(w, mr)| w * mr[e])
                .sum();
            worst = worst.max((composed - ch_e.row(a)[e]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cascade_is_degraded() {
        let b = Channel::bsc("A", "B", 0.1).unwrap();
        let e = b.then(&Channel::bsc("B", "E", 0.1).unwrap()).unwrap();
        let v = degradedness_test(&b, &e).unwrap();
        assert!(v.feasible, "residual {}", v.residual);
        assert!(v.residual < 1e-9);
        let w = v.witness.unwrap();
        assert!((w.row(0)[1] - 0.1).abs() < 1e-7);
    }

    #[test]
    fn better_eve_is_not_degraded() {
        // BSC(0.3) followed by BSC(q) has crossover 0.3 + 0.4q >= 0.3 > 0.1
        let b = Channel::bsc("A", "B", 0.3).unwrap();
        let e = Channel::bsc("A", "E", 0.1).unwrap();
        let v = degradedness_test(&b, &e).unwrap();
        assert!(!v.feasible);
        // p(1|1) - p(1|0) = 0.4 (M(1|1) - M(1|0)) <= 0.4 against a target gap
        // of 0.8, so no M gets below 0.2
        assert!((v.residual - 0.2).abs() < 1e-6, "{}", v.residual);
        assert!(v.witness.is_none());
    }

    #[test]
    fn self_degraded_with_identity() {
        let b = Channel::from_rows("A", "B", vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3]]).unwrap();
        let v = degradedness_test(&b, &b.relabel("A", "E")).unwrap();
        assert!(v.feasible);
        assert!(v.residual < 1e-9);
    }

    #[test]
    fn mismatched_inputs() {
        let b = Channel::bsc("A", "B", 0.3).unwrap();
        let e = Channel::from_rows("A", "E", vec![vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(degradedness_test(&b, &e), Err(Error::AlphabetMismatch(_))));
    }
}
