//! Closed-form special cases: no eavesdropper side information, uncoded
//! receiver side information, independent keys, Eve's side information at
//! the encoder or decoder, and several receivers or eavesdroppers.

use serde::{Deserialize, Serialize};

use super::descriptor::{Coord, Inequality, PointShape, RegionDescriptor, RegionKind, Sense};
use super::theorem::h_a_given_e;
use crate::auxsearch::{maximize_u, AuxChannelU, Bracket, SearchBudget, WeightedMinBracket};
use crate::error::{Error, Result};
use crate::probcore::{positive_part, JointDistribution};
use crate::seeds::stream;
use crate::vars::{bk, ek, A, B, C, E, U};

/// Markov residuals above this fail a precondition.
pub const MARKOV_TOL: f64 = 1e-10;

fn ge(label: &str, coord: Coord, bound: f64) -> Inequality {
    Inequality::new(label, vec![(coord, 1.0)], Sense::Ge, bound)
}

fn le(label: &str, coord: Coord, bound: f64) -> Inequality {
    Inequality::new(label, vec![(coord, 1.0)], Sense::Le, bound)
}

/// R_A + Delta_k >= bound, i.e. Delta_k >= [bound - R_A]^+.
fn sum_lower(label: &str, k: usize, bound: f64) -> Inequality {
    Inequality::new(label, vec![(Coord::Ra, 1.0), (Coord::Delta(k), 1.0)], Sense::Ge, bound).delta_lower()
}

/// Region when Eve has no side information.
pub fn corollary1_region(j_ac: &JointDistribution) -> Result<RegionDescriptor> {
    let mut rd = RegionDescriptor::new(RegionKind::Corollary1, PointShape::Triple);
    let hca = rd.constant("H(C|A)", j_ac.h(&[C], &[A])?);
    let hac = rd.constant("H(A|C)", j_ac.h(&[A], &[C])?);
    let hjoint = rd.constant("H(A,C)", j_ac.h(&[A, C], &[])?);
    let ha = rd.constant("H(A)", j_ac.h(&[A], &[])?);
    let iac = rd.constant("I(A;C)", j_ac.mi(&[A], &[C], &[])?);
    rd.push(ge("R_C >= H(C|A)", Coord::Rc, hca));
    rd.push(ge("R_A >= H(A|C)", Coord::Ra, hac));
    rd.push(Inequality::new(
        "R_A + R_C >= H(A,C)",
        vec![(Coord::Ra, 1.0), (Coord::Rc, 1.0)],
        Sense::Ge,
        hjoint,
    ));
    rd.push(sum_lower("Delta >= [H(A) - R_A]^+", 0, ha));
    rd.push(le("Delta <= I(A;C)", Coord::Delta(0), iac));
    rd.push(Inequality::new(
        "Delta <= R_C - H(C|A)",
        vec![(Coord::Delta(0), 1.0), (Coord::Rc, -1.0)],
        Sense::Le,
        -hca,
    ));
    Ok(rd)
}

/// How U enters a region that depends on it.
#[derive(Debug, Clone, Copy)]
pub enum UInput<'a> {
    /// Attach this channel from A.
    Channel(&'a AuxChannelU),
    /// The joint already has a `U` axis; its Markov condition is checked.
    InJoint,
}

/// Returns a joint with U, verifying U - A - (everything else).
fn with_u(j: &JointDistribution, u: UInput<'_>) -> Result<JointDistribution> {
    match u {
        UInput::Channel(ch) => {
            if j.has(U) {
                return Err(Error::NameCollision(U.into()));
            }
            j.attach_channel(ch.channel(), A)
        }
        UInput::InJoint => {
            j.axis(U)?;
            let rest: Vec<&str> = j.names().into_iter().filter(|n| *n != U && *n != A).collect();
            if !rest.is_empty() {
                let residual = j.markov_residual(&[U], &[A], &rest)?;
                if residual > MARKOV_TOL {
                    return Err(Error::NotMarkov { residual });
                }
            }
            Ok(j.clone())
        }
    }
}

/// [I(A;X|U) - I(A;E|U)]^+ on a joint carrying U.
fn bracket_u(j: &JointDistribution, x: &str, e: &str) -> Result<f64> {
    Ok(positive_part(j.mi(&[A], &[x], &[U])? - j.mi(&[A], &[e], &[U])?))
}

fn uncoded_rows(rd: &mut RegionDescriptor, rate_label: &str, rate: f64, br_label: &str, br: f64, hae: f64) {
    rd.push(ge(rate_label, Coord::Ra, rate));
    rd.push(le(br_label, Coord::Delta(0), br));
    rd.push(sum_lower("R_A + Delta >= H(A|E)", 0, hae));
}

/// Region with uncoded side information B at Bob, at a fixed U.
pub fn corollary2_region(j_abe: &JointDistribution, u: UInput<'_>) -> Result<RegionDescriptor> {
    let j = with_u(j_abe, u)?;
    let mut rd = RegionDescriptor::new(RegionKind::Corollary2, PointShape::Pair);
    let hab = rd.constant("H(A|B)", j.h(&[A], &[B])?);
    let hae = rd.constant("H(A|E)", j.h(&[A], &[E])?);
    let br = rd.constant("[I(A;B|U) - I(A;E|U)]^+", bracket_u(&j, B, E)?);
    uncoded_rows(&mut rd, "R_A >= H(A|B)", hab, "Delta <= [I(A;B|U) - I(A;E|U)]^+", br, hae);
    rd.aux_witness.u = Some(u_of(&j)?);
    Ok(rd)
}

fn u_of(j: &JointDistribution) -> Result<AuxChannelU> {
    AuxChannelU::from_rows(j.conditional(U, &[A])?.rows)
}

/// Region when B is independent of (A, E) and acts as a key of entropy `h_b`.
pub fn lemma1_region(j_ae: &JointDistribution, h_b: f64) -> Result<RegionDescriptor> {
    if !(h_b >= 0.0) || !h_b.is_finite() {
        return Err(Error::InvalidArgument(format!("H(B) must be finite and >= 0, got {h_b}")));
    }
    let mut rd = RegionDescriptor::new(RegionKind::Lemma1, PointShape::Pair);
    let ha = rd.constant("H(A)", j_ae.h(&[A], &[])?);
    let hae = rd.constant("H(A|E)", h_a_given_e(j_ae)?);
    let hb = rd.constant("H(B)", h_b);
    rd.push(ge("R_A >= H(A)", Coord::Ra, ha));
    rd.push(le("Delta <= H(B)", Coord::Delta(0), hb));
    rd.push(le("Delta <= H(A|E)", Coord::Delta(0), hae));
    Ok(rd)
}

/// Where Eve's side information is also available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvePlacement {
    AtBob,
    AtAlice,
}

pub fn eve_si_regions(j_abe: &JointDistribution, placement: EvePlacement) -> Result<RegionDescriptor> {
    let (kind, rate_label, rate) = match placement {
        EvePlacement::AtBob => (RegionKind::EveSiAtBob, "R_A >= H(A|B,E)", j_abe.h(&[A], &[B, E])?),
        EvePlacement::AtAlice => (RegionKind::EveSiAtAlice, "R_A >= H(A|B)", j_abe.h(&[A], &[B])?),
    };
    let mut rd = RegionDescriptor::new(kind, PointShape::Pair);
    let key = if placement == EvePlacement::AtBob { "H(A|B,E)" } else { "H(A|B)" };
    let rate = rd.constant(key, rate);
    let imi = rd.constant("I(A;B|E)", j_abe.mi(&[A], &[B], &[E])?);
    let hae = rd.constant("H(A|E)", j_abe.h(&[A], &[E])?);
    uncoded_rows(&mut rd, rate_label, rate, "Delta <= I(A;B|E)", imi, hae);
    Ok(rd)
}

/// Number of consecutive `{prefix}1`, `{prefix}2`, ... axes.
pub fn count_indexed(j: &JointDistribution, name: fn(usize) -> String) -> usize {
    (1..).take_while(|&k| j.has(&name(k))).count()
}

fn require_receivers(j: &JointDistribution) -> Result<usize> {
    match count_indexed(j, bk) {
        0 => Err(Error::UnknownVariable(bk(1))),
        k => Ok(k),
    }
}

/// Several receivers, each with A - B_k - E.
pub fn corollary3_region(j: &JointDistribution) -> Result<RegionDescriptor> {
    let k_max = require_receivers(j)?;
    let mut worst: Option<(usize, f64)> = None;
    for k in 1..=k_max {
        let r = j.markov_residual(&[A], &[&bk(k)], &[E])?;
        if r > MARKOV_TOL && worst.is_none_or(|(_, w)| r > w) {
            worst = Some((k, r));
        }
    }
    if let Some((index, residual)) = worst {
        return Err(Error::MarkovPreconditionFailed {
            chain: format!("A - B{index} - E"),
            index,
            residual,
        });
    }
    let mut rd = RegionDescriptor::new(RegionKind::Corollary3, PointShape::Pair);
    let hae = rd.constant("H(A|E)", j.h(&[A], &[E])?);
    let mut rate: f64 = 0.0;
    let mut gap = f64::INFINITY;
    for k in 1..=k_max {
        let h = rd.constant(format!("H(A|B{k})"), j.h(&[A], &[&bk(k)])?);
        rate = rate.max(h);
        gap = gap.min(hae - h);
    }
    let rate = rd.constant("max_k H(A|B_k)", rate);
    let gap = rd.constant("min_k [H(A|E) - H(A|B_k)]", gap);
    uncoded_rows(&mut rd, "R_A >= max_k H(A|B_k)", rate, "Delta <= min_k [H(A|E) - H(A|B_k)]", gap, hae);
    Ok(rd)
}

/// Checks A - B_1 - ... - B_K, returning the worst failing link.
fn check_receiver_chain(j: &JointDistribution, k_max: usize) -> Result<()> {
    let mut worst: Option<(usize, f64)> = None;
    for k in 1..k_max {
        let mut past: Vec<String> = vec![A.to_string()];
        past.extend((1..k).map(bk));
        let past: Vec<&str> = past.iter().map(String::as_str).collect();
        let r = j.markov_residual(&past, &[&bk(k)], &[&bk(k + 1)])?;
        if r > MARKOV_TOL && worst.is_none_or(|(_, w)| r > w) {
            worst = Some((k, r));
        }
    }
    match worst {
        Some((index, residual)) => Err(Error::MarkovPreconditionFailed {
            chain: format!("A - B1 - ... - B{} (link at B{index})", k_max),
            index,
            residual,
        }),
        None => Ok(()),
    }
}

/// Degraded receivers A - B_1 - ... - B_K, at a fixed U.
pub fn corollary4_region(j: &JointDistribution, u: UInput<'_>) -> Result<RegionDescriptor> {
    let k_max = require_receivers(j)?;
    check_receiver_chain(j, k_max)?;
    let j = with_u(j, u)?;
    let worst = bk(k_max);
    let mut rd = RegionDescriptor::new(RegionKind::Corollary4, PointShape::Pair);
    let rate = rd.constant(format!("H(A|B{k_max})"), j.h(&[A], &[&worst])?);
    let hae = rd.constant("H(A|E)", j.h(&[A], &[E])?);
    let br = rd.constant(format!("[I(A;B{k_max}|U) - I(A;E|U)]^+"), bracket_u(&j, &worst, E)?);
    uncoded_rows(
        &mut rd,
        &format!("R_A >= H(A|B{k_max})"),
        rate,
        &format!("Delta <= [I(A;B{k_max}|U) - I(A;E|U)]^+"),
        br,
        hae,
    );
    rd.aux_witness.u = Some(u_of(&j)?);
    Ok(rd)
}

/// Searches U against the worst receiver B_K and returns the region there.
pub fn corollary4_best(j: &JointDistribution, card_u: usize, budget: &SearchBudget) -> Result<RegionDescriptor> {
    let k_max = require_receivers(j)?;
    check_receiver_chain(j, k_max)?;
    let br = Bracket::from_joint(j, A, &bk(k_max), Some(E))?;
    let prior = j.marginal(&[A])?.mass().to_vec();
    let out = maximize_u(&br, &prior, card_u, budget, None, stream::U_RESTART)?;
    corollary4_region(j, UInput::Channel(&out.u))
}

/// Several eavesdroppers E_1..E_K sharing one U.
pub fn corollary5_region(j: &JointDistribution, u: UInput<'_>) -> Result<RegionDescriptor> {
    let k_max = match count_indexed(j, ek) {
        0 => return Err(Error::UnknownVariable(ek(1))),
        k => k,
    };
    let j = with_u(j, u)?;
    let mut rd = RegionDescriptor::new(RegionKind::Corollary5, PointShape::MultiDelta(k_max));
    let hab = rd.constant("H(A|B)", j.h(&[A], &[B])?);
    rd.push(ge("R_A >= H(A|B)", Coord::Ra, hab));
    let habu = j.h(&[A], &[B, U])?;
    for k in 1..=k_max {
        let e = ek(k);
        let br = rd.constant(
            format!("[H(A|E{k},U) - H(A|B,U)]^+"),
            positive_part(j.h(&[A], &[&e, U])? - habu),
        );
        let hae = rd.constant(format!("H(A|E{k})"), j.h(&[A], &[&e])?);
        rd.push(le(&format!("Delta_{k} <= [H(A|E{k},U) - H(A|B,U)]^+"), Coord::Delta(k - 1), br));
        rd.push(sum_lower(&format!("R_A + Delta_{k} >= H(A|E{k})"), k - 1, hae));
    }
    rd.aux_witness.u = Some(u_of(&j)?);
    Ok(rd)
}

/// Maximizes min_k w_k [H(A|E_k,U) - H(A|B,U)] over one shared U and returns
/// the region at the maximizer. `weights` defaults to all ones.
pub fn corollary5_best(
    j: &JointDistribution,
    card_u: usize,
    weights: Option<&[f64]>,
    budget: &SearchBudget,
) -> Result<RegionDescriptor> {
    let k_max = count_indexed(j, ek);
    if k_max == 0 {
        return Err(Error::UnknownVariable(ek(1)));
    }
    let ones = vec![1.0; k_max];
    let weights = weights.unwrap_or(&ones);
    if weights.len() != k_max {
        return Err(Error::DimensionMismatch {
            expected: k_max,
            actual: weights.len(),
        });
    }
    let parts = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Ok((w, Bracket::from_joint(j, A, B, Some(&ek(i + 1)))?)))
        .collect::<Result<Vec<_>>>()?;
    let objective = WeightedMinBracket::new(parts)?;
    let prior = j.marginal(&[A])?.mass().to_vec();
    let out = maximize_u(&objective, &prior, card_u, budget, None, stream::U_RESTART)?;
    corollary5_region(j, UInput::Channel(&out.u))
}
