use serde::{Deserialize, Serialize};

use super::coding::{estimate_error, ErrorEstimate};
use super::equivocation::{exact_equivocation, EquivocationReport};
use super::scheme::{generate_codebooks, BinCounts, SchemeConfig};
use crate::error::Result;
use crate::probcore::positive_part;
use crate::vars::{A, E, U, V};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheorySummary {
    /// [I(A;V|U) - I(A;E|U)]^+.
    pub target_delta: f64,
    pub h_a_given_e: f64,
    pub h_a_given_v: f64,
    pub alice_rate: f64,
    /// Alice's rate covers H(A|V).
    pub rate_check: bool,
    /// H(A|E) - rate.
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: usize,
    pub seed: u64,
    pub counts: BinCounts,
    pub error: ErrorEstimate,
    pub equivocation: EquivocationReport,
    pub theory: TheorySummary,
}

/// Codebooks, error estimate and equivocation for one configuration.
pub fn run_experiment(cfg: &SchemeConfig, trials: u64) -> Result<ExperimentReport> {
    let cb = generate_codebooks(cfg)?;
    let error = estimate_error(cfg, &cb, trials)?;
    let equivocation = exact_equivocation(cfg, &cb)?;
    equivocation.check_invariants()?;
    let j = &cfg.extended;
    let alice_rate = cfg.alice_rate();
    let h_a_given_v = j.h(&[A], &[V])?;
    let h_a_given_e = j.h(&[A], &[E])?;
    let theory = TheorySummary {
        target_delta: positive_part(j.mi(&[A], &[V], &[U])? - j.mi(&[A], &[E], &[U])?),
        h_a_given_e,
        h_a_given_v,
        alice_rate,
        rate_check: alice_rate >= h_a_given_v - 1e-9,
        floor: h_a_given_e - alice_rate,
    };
    Ok(ExperimentReport {
        n: cfg.n,
        seed: cfg.seed,
        counts: cfg.counts,
        error,
        equivocation,
        theory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxsearch::{AuxChannelU, VMap};
    use crate::binsim::scheme::{plan_scheme, Margins};
    use crate::probcore::JointDistribution;
    use crate::vars::C;

    #[test]
    fn dsbs_without_eve() {
        let j = JointDistribution::from_sizes(&[(A, 2), (C, 2)], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let cfg = plan_scheme(&j, &AuxChannelU::constant(2), &VMap::identity(2), 12, Margins::default(), 0.15, 5)
            .unwrap();
        let r = run_experiment(&cfg, 100).unwrap();
        let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((r.theory.target_delta - (1.0 - h(0.1))).abs() < 1e-12);
        assert!((r.theory.floor - (1.0 - r.theory.alice_rate)).abs() < 1e-12);
        assert!(r.equivocation.per_symbol >= r.theory.floor - 1e-9);
        assert_eq!(run_experiment(&cfg, 100).unwrap(), r);
    }
}
