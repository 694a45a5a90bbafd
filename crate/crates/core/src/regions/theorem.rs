//! Inner and outer bounds on the full (R_A, R_C, Delta) region.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::descriptor::{Coord, Inequality, PointShape, RegionDescriptor, RegionKind, Sense};
use crate::auxsearch::{
    enumerate_vmaps, maximize_u, AuxChannelU, Bracket, SearchBudget, UObjective, VMap, VMAP_TOL,
};
use crate::error::{Error, Result};
use crate::probcore::{positive_part, JointDistribution};
use crate::seeds::{derive_seed, stream};
use crate::vars::{A, C, E, U, V};

/// Slack on rate requirements and on the Delta interval.
pub const RATE_TOL: f64 = 1e-9;

pub const LABEL_RC: &str = "R_C >= I(C;V)";
pub const LABEL_RA: &str = "R_A >= H(A|V)";
pub const LABEL_DELTA: &str =
    "[H(A|E) - R_A]^+ <= min{[I(A;V|U) - I(A;E|U)]^+, R_C - H(C|A), I(A;C)}";

/// Seed stream for per-V searches; the V index is mixed into the seed.
const V_STREAM: u64 = 30;

/// Source quantities that do not depend on the auxiliaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceTerms {
    pub h_c_given_a: f64,
    pub i_ac: f64,
    /// H(A|E), or H(A) when Eve has no side information.
    pub h_a_given_e: f64,
    pub h_c: f64,
}

impl SourceTerms {
    pub fn of(j_ace: &JointDistribution) -> Result<Self> {
        Ok(Self {
            h_c_given_a: j_ace.h(&[C], &[A])?,
            i_ac: j_ace.mi(&[A], &[C], &[])?,
            h_a_given_e: h_a_given_e(j_ace)?,
            h_c: j_ace.h(&[C], &[])?,
        })
    }

    /// min{R_C - H(C|A), I(A;C)}, clipped at zero.
    pub fn rate_cap(&self, rc: f64) -> f64 {
        (rc - self.h_c_given_a).min(self.i_ac).max(0.0)
    }

    /// [H(A|E) - R_A]^+.
    pub fn delta_lower(&self, ra: f64) -> f64 {
        positive_part(self.h_a_given_e - ra)
    }
}

pub(crate) fn h_a_given_e(j: &JointDistribution) -> Result<f64> {
    if j.has(E) {
        j.h(&[A], &[E])
    } else {
        j.h(&[A], &[])
    }
}

/// One admissible V with the best U found for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VCandidate {
    pub v: VMap,
    pub i_cv: f64,
    pub h_a_given_v: f64,
    /// [I(A;V|U) - I(A;E|U)]^+ at `u`.
    pub bracket: f64,
    pub u: AuxChannelU,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Achievable,
    /// No admissible V meets both rate requirements.
    RatesBelowRequirement,
    /// Rates are met but the Delta lower bound exceeds every upper bound.
    EmptyDeltaInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEvaluation {
    pub ra: f64,
    pub rc: f64,
    pub status: PointStatus,
    /// Largest certified Delta (inner) or upper bound (outer).
    pub delta: Option<f64>,
    pub delta_lower: f64,
    /// Index into the evaluator's candidates.
    pub witness: Option<usize>,
}

/// Per-V search results over all admissible partitions of C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremEvaluator {
    pub source: SourceTerms,
    pub candidates: Vec<VCandidate>,
    pub outer: bool,
}

fn v_bracket(j_ace: &JointDistribution, v: &VMap) -> Result<(JointDistribution, Bracket)> {
    let jv = j_ace.attach_channel(&v.channel(), C)?;
    let e = jv.has(E).then_some(E);
    let br = Bracket::from_joint(&jv, A, V, e)?;
    Ok((jv, br))
}

fn budget_for(budget: &SearchBudget, index: usize) -> SearchBudget {
    budget.with_seed(derive_seed(budget.seed, V_STREAM, index as u64))
}

impl TheoremEvaluator {
    /// Searches U for every admissible V (inner bound).
    pub fn inner(j_ace: &JointDistribution, card_u: usize, budget: &SearchBudget) -> Result<Self> {
        Self::build(j_ace, card_u, budget, false)
    }

    /// Same searches plus a second seed stream per V and, for binary A, the
    /// concave envelope over the prior. Every inner value is dominated.
    pub fn outer(j_ace: &JointDistribution, card_u: usize, budget: &SearchBudget) -> Result<Self> {
        Self::build(j_ace, card_u, budget, true)
    }

    fn build(j_ace: &JointDistribution, card_u: usize, budget: &SearchBudget, outer: bool) -> Result<Self> {
        budget.validate()?;
        let source = SourceTerms::of(j_ace)?;
        let prior = j_ace.marginal(&[A])?.mass().to_vec();
        let mut candidates = Vec::new();
        for (idx, v) in enumerate_vmaps(j_ace)?.into_iter().enumerate() {
            let (jv, br) = v_bracket(j_ace, &v)?;
            let b = budget_for(budget, idx);
            let mut best = maximize_u(&br, &prior, card_u, &b, None, stream::U_RESTART)?;
            if outer {
                let second = maximize_u(&br, &prior, card_u, &b, Some(&best.u), stream::U_OUTER)?;
                if second.value > best.value {
                    best = second;
                }
                if let Some((value, rows)) = binary_envelope(&br, &prior)? {
                    if value > best.value {
                        best.value = value;
                        best.u = AuxChannelU::from_rows(rows)?;
                    }
                }
            }
            candidates.push(VCandidate {
                i_cv: jv.mi(&[C], &[V], &[])?,
                h_a_given_v: jv.h(&[A], &[V])?,
                bracket: positive_part(best.value),
                u: best.u,
                v,
            });
        }
        Ok(Self {
            source,
            candidates,
            outer,
        })
    }

    fn rate_feasible(&self, c: &VCandidate, ra: f64, rc: f64) -> bool {
        rc >= c.i_cv - RATE_TOL && ra >= c.h_a_given_v - RATE_TOL
    }

    /// Inner: best certified Delta over rate-feasible V with a nonempty
    /// interval. Outer: term-wise maxima over rate-feasible V, with the
    /// Delta lower bound ignored.
    pub fn evaluate(&self, ra: f64, rc: f64) -> PointEvaluation {
        let lower = self.source.delta_lower(ra);
        let rate_cap = self.source.rate_cap(rc);
        let mut any_rates = false;
        let mut best: Option<(f64, usize)> = None;
        for (i, c) in self.candidates.iter().enumerate() {
            if !self.rate_feasible(c, ra, rc) {
                continue;
            }
            any_rates = true;
            let value = if self.outer { c.bracket } else { c.bracket.min(rate_cap) };
            if !self.outer && lower > value + RATE_TOL {
                continue;
            }
            if best.is_none_or(|(b, _)| value > b + 1e-12) {
                best = Some((value, i));
            }
        }
        let (status, delta, witness) = match best {
            Some((v, i)) => {
                let d = if self.outer { v.min(rate_cap) } else { v };
                (PointStatus::Achievable, Some(d), Some(i))
            }
            None if any_rates => (PointStatus::EmptyDeltaInterval, None, None),
            None => (PointStatus::RatesBelowRequirement, None, None),
        };
        PointEvaluation {
            ra,
            rc,
            status,
            delta,
            delta_lower: lower,
            witness,
        }
    }
}

/// Concave envelope of the constant-U bracket as a function of the prior on
/// a binary A, evaluated at the actual prior. Returns the value and the
/// two-symbol U whose posteriors are the envelope's support points.
fn binary_envelope(br: &Bracket, prior: &[f64]) -> Result<Option<(f64, Vec<Vec<f64>>)>> {
    const STEPS: usize = 400;
    if prior.len() != 2 || prior[0] <= 0.0 || prior[1] <= 0.0 {
        return Ok(None);
    }
    let p = prior[0];
    let grid: Vec<(f64, f64)> = (0..=STEPS)
        .map(|k| {
            let q = k as f64 / STEPS as f64;
            br.with_prior(&[q, 1.0 - q]).map(|b| (q, b.value(&[vec![1.0], vec![1.0]])))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, f64, f64)> = None;
    for &(q1, f1) in grid.iter().filter(|(q, _)| *q < p) {
        for &(q2, f2) in grid.iter().filter(|(q, _)| *q > p) {
            let lam = (q2 - p) / (q2 - q1);
            let val = lam * f1 + (1.0 - lam) * f2;
            if best.is_none_or(|(b, _, _)| val > b) {
                best = Some((val, q1, q2));
            }
        }
    }
    let Some((_, q1, q2)) = best else {
        return Ok(None);
    };
    // p(u=0) = lam with p(a=0|u=0) = q1 and p(a=0|u=1) = q2
    let lam = (q2 - p) / (q2 - q1);
    let rows = vec![
        vec![lam * q1 / p, (1.0 - lam) * q2 / p],
        vec![lam * (1.0 - q1) / (1.0 - p), (1.0 - lam) * (1.0 - q2) / (1.0 - p)],
    ];
    let rows: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.into_iter().map(|x| x / s).collect()
        })
        .collect();
    // report the value at the realized channel, not the interpolation
    Ok(Some((br.value(&rows), rows)))
}

/// Bounds of the inner region at one auxiliary pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerPointReport {
    pub feasible: bool,
    /// [I(A;V|U) - I(A;E|U)]^+.
    pub bracket: f64,
    /// min{R_C - H(C|A), I(A;C)}.
    pub rate_cap: f64,
    /// [H(A|E) - R_A]^+.
    pub delta_lower: f64,
    pub i_cv: f64,
    pub h_a_given_v: f64,
    pub violated: Vec<String>,
}

/// Extended joint over (A, C, E, U, V) with U from A and V = g(C).
pub fn extend_with_aux(j_ace: &JointDistribution, u: &AuxChannelU, v: &VMap) -> Result<JointDistribution> {
    let residual = v.residual(j_ace)?;
    if residual > VMAP_TOL {
        return Err(Error::NotInPin(format!("H(C|A,V) = {residual:.3e}")));
    }
    if j_ace.has(U) || j_ace.has(V) {
        return Err(Error::NotInPin("source already carries U or V".into()));
    }
    if u.rows().len() != j_ace.axis(A)?.size() {
        return Err(Error::NotInPin(format!(
            "U channel has {} rows, A has {} symbols",
            u.rows().len(),
            j_ace.axis(A)?.size()
        )));
    }
    j_ace.attach_channel(u.channel(), A)?.attach_channel(&v.channel(), C)
}

/// Evaluates every inner-bound inequality at one (U, V) and rate pair.
pub fn inner_point(j_ace: &JointDistribution, u: &AuxChannelU, v: &VMap, ra: f64, rc: f64) -> Result<InnerPointReport> {
    let ext = extend_with_aux(j_ace, u, v)?;
    let leak = if ext.has(E) { ext.mi(&[A], &[E], &[U])? } else { 0.0 };
    let bracket = positive_part(ext.mi(&[A], &[V], &[U])? - leak);
    let source = SourceTerms::of(j_ace)?;
    let rate_cap = (rc - source.h_c_given_a).min(source.i_ac);
    let delta_lower = source.delta_lower(ra);
    let i_cv = ext.mi(&[C], &[V], &[])?;
    let h_a_given_v = ext.h(&[A], &[V])?;
    let mut violated = Vec::new();
    if rc < i_cv - RATE_TOL {
        violated.push(LABEL_RC.to_string());
    }
    if ra < h_a_given_v - RATE_TOL {
        violated.push(LABEL_RA.to_string());
    }
    if delta_lower > bracket.min(rate_cap) + RATE_TOL {
        violated.push(LABEL_DELTA.to_string());
    }
    Ok(InnerPointReport {
        feasible: violated.is_empty(),
        bracket,
        rate_cap,
        delta_lower,
        i_cv,
        h_a_given_v,
        violated,
    })
}

/// Over-approximation of the outer bound at a rate pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterBound {
    /// `None` when no searched V meets the rate requirements.
    pub delta_upper: Option<f64>,
    pub bracket_max: Option<f64>,
    pub rate_cap: f64,
}

pub fn outer_overapprox(
    j_ace: &JointDistribution,
    ra: f64,
    rc: f64,
    card_u: usize,
    budget: &SearchBudget,
) -> Result<OuterBound> {
    let ev = TheoremEvaluator::outer(j_ace, card_u, budget)?;
    Ok(outer_from(&ev, ra, rc))
}

pub fn outer_from(ev: &TheoremEvaluator, ra: f64, rc: f64) -> OuterBound {
    let pt = ev.evaluate(ra, rc);
    let bracket_max = pt.witness.map(|i| ev.candidates[i].bracket);
    OuterBound {
        delta_upper: pt.delta,
        bracket_max,
        rate_cap: ev.source.rate_cap(rc),
    }
}

/// Inner region at a fixed (U, V) as an inequality system.
pub fn theorem1_inner_region(j_ace: &JointDistribution, u: &AuxChannelU, v: &VMap) -> Result<RegionDescriptor> {
    let ext = extend_with_aux(j_ace, u, v)?;
    let source = SourceTerms::of(j_ace)?;
    let leak = if ext.has(E) { ext.mi(&[A], &[E], &[U])? } else { 0.0 };
    let mut rd = RegionDescriptor::new(RegionKind::Theorem1Inner, PointShape::Triple);
    let i_cv = rd.constant("I(C;V)", ext.mi(&[C], &[V], &[])?);
    let h_av = rd.constant("H(A|V)", ext.h(&[A], &[V])?);
    let br = rd.constant(
        "[I(A;V|U) - I(A;E|U)]^+",
        positive_part(ext.mi(&[A], &[V], &[U])? - leak),
    );
    let hca = rd.constant("H(C|A)", source.h_c_given_a);
    let iac = rd.constant("I(A;C)", source.i_ac);
    let hae = rd.constant("H(A|E)", source.h_a_given_e);
    push_theorem_rows(&mut rd, i_cv, h_av, br, hca, iac, Some(hae));
    rd.aux_witness.u = Some(u.clone());
    rd.aux_witness.v = Some(v.clone());
    Ok(rd)
}

fn push_theorem_rows(rd: &mut RegionDescriptor, i_cv: f64, h_av: f64, br: f64, hca: f64, iac: f64, hae: Option<f64>) {
    rd.push(Inequality::new(LABEL_RC, vec![(Coord::Rc, 1.0)], Sense::Ge, i_cv));
    rd.push(Inequality::new(LABEL_RA, vec![(Coord::Ra, 1.0)], Sense::Ge, h_av));
    rd.push(Inequality::new(
        "Delta <= [I(A;V|U) - I(A;E|U)]^+",
        vec![(Coord::Delta(0), 1.0)],
        Sense::Le,
        br,
    ));
    rd.push(Inequality::new(
        "Delta <= R_C - H(C|A)",
        vec![(Coord::Delta(0), 1.0), (Coord::Rc, -1.0)],
        Sense::Le,
        -hca,
    ));
    rd.push(Inequality::new("Delta <= I(A;C)", vec![(Coord::Delta(0), 1.0)], Sense::Le, iac));
    if let Some(hae) = hae {
        rd.push(
            Inequality::new(
                "Delta >= [H(A|E) - R_A]^+",
                vec![(Coord::Delta(0), 1.0), (Coord::Ra, 1.0)],
                Sense::Ge,
                hae,
            )
            .delta_lower(),
        );
    }
}

/// A single inequality system containing the outer bound: the rate
/// requirements are relaxed to their minimum over admissible V and the
/// equivocation bound to its maximum.
pub fn theorem1_outer_region(j_ace: &JointDistribution, card_u: usize, budget: &SearchBudget) -> Result<RegionDescriptor> {
    Ok(theorem1_outer_from(&TheoremEvaluator::outer(j_ace, card_u, budget)?))
}

/// [`theorem1_outer_region`] from an existing outer evaluator.
pub fn theorem1_outer_from(ev: &TheoremEvaluator) -> RegionDescriptor {
    let fold = |f: fn(&VCandidate) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
        ev.candidates.iter().map(f).fold(init, pick)
    };
    let mut rd = RegionDescriptor::new(RegionKind::Theorem1OuterOverapprox, PointShape::Triple);
    let i_cv = rd.constant("min_V I(C;V)", fold(|c| c.i_cv, f64::INFINITY, f64::min));
    let h_av = rd.constant("min_V H(A|V)", fold(|c| c.h_a_given_v, f64::INFINITY, f64::min));
    let br = rd.constant(
        "max_(U,V) [I(A;V|U) - I(A;E|U)]^+",
        fold(|c| c.bracket, 0.0, f64::max),
    );
    let hca = rd.constant("H(C|A)", ev.source.h_c_given_a);
    let iac = rd.constant("I(A;C)", ev.source.i_ac);
    push_theorem_rows(&mut rd, i_cv, h_av, br, hca, iac, None);
    if let Some(best) = ev.candidates.iter().max_by(|a, b| a.bracket.total_cmp(&b.bracket)) {
        rd.aux_witness.u = Some(best.u.clone());
        rd.aux_witness.v = Some(best.v.clone());
    }
    rd
}

/// Named per-V quantities, for reporting.
pub fn candidate_constants(c: &VCandidate) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("I(C;V)".to_string(), c.i_cv),
        ("H(A|V)".to_string(), c.h_a_given_v),
        ("[I(A;V|U) - I(A;E|U)]^+".to_string(), c.bracket),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::Channel;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    /// A uniform, C = A, E = BSC(q)(A).
    fn copy_source(q: f64) -> JointDistribution {
        JointDistribution::uniform(A, 2)
            .unwrap()
            .attach_channel(&Channel::identity(A, C, 2).unwrap(), A)
            .unwrap()
            .attach_channel(&Channel::bsc(A, E, q).unwrap(), A)
            .unwrap()
    }

    fn quick() -> SearchBudget {
        SearchBudget {
            restarts: 8,
            iterations: 200,
            ..SearchBudget::default()
        }
    }

    #[test]
    fn inner_point_copy_source() {
        let j = copy_source(0.25);
        let u = AuxChannelU::constant(2);
        let v = VMap::identity(2);
        let r = inner_point(&j, &u, &v, 0.0, 1.0).unwrap();
        assert!(r.feasible, "{:?}", r.violated);
        assert!((r.bracket - h2(0.25)).abs() < 1e-12);
        assert!((r.rate_cap - 1.0).abs() < 1e-12);
        assert!((r.delta_lower - h2(0.25)).abs() < 1e-12);

        let r = inner_point(&j, &u, &v, 0.0, 0.5).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.violated[0], LABEL_RC);
        // R_C - H(C|A) = 0.5 < h(0.25) also empties the Delta interval
        assert_eq!(r.violated.len(), 2);
    }

    #[test]
    fn eve_sees_source_kills_bracket() {
        let j = copy_source(0.0);
        for v in enumerate_vmaps(&j).unwrap() {
            for u in [AuxChannelU::constant(2), AuxChannelU::copy(2)] {
                assert!(inner_point(&j, &u, &v, 1.0, 1.0).unwrap().bracket.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inner_point_rejects_bad_v() {
        // A independent of C: merging C loses it
        let j = JointDistribution::from_sizes(&[(A, 2), (C, 2)], vec![0.25; 4]).unwrap();
        let err = inner_point(&j, &AuxChannelU::constant(2), &VMap::merge_all(2), 1.0, 1.0);
        assert!(matches!(err, Err(Error::NotInPin(_))));
    }

    #[test]
    fn outer_without_eve_is_corollary_bound() {
        let j = JointDistribution::from_sizes(&[(A, 2), (C, 2)], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let iac = 1.0 - h2(0.1);
        let hca = h2(0.1);
        for rc in [1.0, 1.2] {
            let o = outer_overapprox(&j, 1.0, rc, 3, &quick()).unwrap();
            let want = iac.min(rc - hca);
            assert!((o.delta_upper.unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn outer_zero_at_minimum_rc() {
        // C = A: H(C|A) = 0 and the constant V meets R_C = 0
        let o = outer_overapprox(&copy_source(0.2), 1.0, 0.0, 3, &quick()).unwrap();
        assert!(o.delta_upper.unwrap().abs() < 1e-9);
        // noisy C: R_C = H(C|A) is below every admissible I(C;V)
        let j = JointDistribution::uniform(A, 2)
            .unwrap()
            .attach_channel(&Channel::bsc(A, C, 0.1).unwrap(), A)
            .unwrap()
            .attach_channel(&Channel::bsc(A, E, 0.3).unwrap(), A)
            .unwrap();
        assert!(outer_overapprox(&j, 1.0, h2(0.1), 3, &quick()).unwrap().delta_upper.is_none());
    }

    #[test]
    fn outer_dominates_inner() {
        let j = JointDistribution::uniform(A, 2)
            .unwrap()
            .attach_channel(&Channel::bsc(A, C, 0.1).unwrap(), A)
            .unwrap()
            .attach_channel(&Channel::bsc(A, E, 0.3).unwrap(), A)
            .unwrap();
        let inner = TheoremEvaluator::inner(&j, 3, &quick()).unwrap();
        let outer = TheoremEvaluator::outer(&j, 3, &quick()).unwrap();
        for ra in [0.0, 0.4, 0.8, 1.0] {
            for rc in [0.5, 0.8, 1.0] {
                if let Some(d) = inner.evaluate(ra, rc).delta {
                    assert!(d <= outer.evaluate(ra, rc).delta.unwrap() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn descriptors_carry_constants() {
        let j = copy_source(0.25);
        let rd = theorem1_inner_region(&j, &AuxChannelU::constant(2), &VMap::identity(2)).unwrap();
        assert!((rd.get("I(C;V)").unwrap() - 1.0).abs() < 1e-12);
        assert!((rd.get("H(A|E)").unwrap() - h2(0.25)).abs() < 1e-12);
        let rd = theorem1_outer_region(&j, 2, &quick()).unwrap();
        assert!(rd.constants.values().all(|&c| c >= 0.0));
    }
}
