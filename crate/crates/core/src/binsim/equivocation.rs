use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::coding::Coder;
use super::scheme::{sequence_at, Codebooks, SchemeConfig};
use crate::error::{Error, Result};
use crate::probcore::{positive_part, JointDistribution};
use crate::seeds::{rng_for, stream};
use crate::vars::{A, E, U, V};

/// Largest |A|^N |E|^N (times the key size) evaluated exactly.
pub const EXACT_LIMIT: u64 = 1 << 26;
/// Eve sequences sampled when exact evaluation is too large.
pub const MC_SAMPLES: u64 = 1 << 14;
const INVARIANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivocationMode {
    Exact,
    MonteCarloEstimate,
}

/// H(A^N | M, E^N) for one encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivocationReport {
    pub n: usize,
    /// Total bits over the block.
    pub total_bits: f64,
    pub per_symbol: f64,
    /// log2(message-space size) / N.
    pub message_rate: f64,
    pub h_a: f64,
    pub h_a_given_e: f64,
    /// H(A|E) - rate: no encoder can do worse.
    pub floor: f64,
    /// [I(A;V|U) - I(A;E|U)]^+ when the encoder is a planned scheme.
    pub target_delta: Option<f64>,
    pub mode: EquivocationMode,
    pub samples: Option<u64>,
}

impl EquivocationReport {
    /// Floor and ceiling checks; estimates are exempt.
    pub fn check_invariants(&self) -> Result<()> {
        if self.mode != EquivocationMode::Exact {
            return Ok(());
        }
        let ceiling = self.h_a.min(self.h_a_given_e);
        if self.per_symbol < self.floor - INVARIANT_TOL || self.per_symbol > ceiling + INVARIANT_TOL {
            return Err(Error::InvariantViolation(format!(
                "equivocation {} outside [{}, {}]",
                self.per_symbol, self.floor, ceiling
            )));
        }
        Ok(())
    }
}

struct SourceModel {
    n: usize,
    na: usize,
    ne: usize,
    /// p(a, e) row-major over (a, e).
    p_ae: Vec<f64>,
    h_a: f64,
    h_a_given_e: f64,
}

impl SourceModel {
    fn new(j: &JointDistribution, n: usize) -> Result<Self> {
        let j_ae = if j.has(E) { j.marginal(&[A, E])? } else { j.marginal(&[A])? };
        let na = j_ae.axis(A)?.size();
        let ne = j_ae.mass().len() / na;
        Ok(Self {
            n,
            na,
            ne,
            p_ae: j_ae.mass().to_vec(),
            h_a: j.h(&[A], &[])?,
            h_a_given_e: if j.has(E) { j.h(&[A], &[E])? } else { j.h(&[A], &[])? },
        })
    }

    fn count(base: usize, n: usize) -> Option<u64> {
        (base as u64).checked_pow(n as u32)
    }

    fn a_count(&self) -> u64 {
        Self::count(self.na, self.n).unwrap_or(u64::MAX)
    }

    fn e_count(&self) -> u64 {
        Self::count(self.ne, self.n).unwrap_or(u64::MAX)
    }

    /// p(a^N, e^N) over all a^N, first symbol most significant.
    fn joint_row(&self, e_seq: &[u8], out: &mut Vec<f64>) {
        out.clear();
        out.push(1.0);
        for &e in e_seq {
            let prev = std::mem::take(out);
            out.reserve(prev.len() * self.na);
            for w in prev {
                for a in 0..self.na {
                    out.push(w * self.p_ae[a * self.ne + e as usize]);
                }
            }
        }
    }

    fn draw_e<R: Rng>(&self, rng: &mut R) -> Vec<u8> {
        let p_e: Vec<f64> = (0..self.ne)
            .map(|e| (0..self.na).map(|a| self.p_ae[a * self.ne + e]).sum())
            .collect();
        (0..self.n)
            .map(|_| {
                let x: f64 = rng.gen();
                let mut acc = 0.0;
                for (e, &p) in p_e.iter().enumerate() {
                    acc += p;
                    if x < acc && p > 0.0 {
                        return e as u8;
                    }
                }
                p_e.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u8
            })
            .collect()
    }

    fn report(&self, total_bits: f64, message_space: f64, mode: EquivocationMode, samples: Option<u64>) -> EquivocationReport {
        let rate = message_space.log2() / self.n as f64;
        EquivocationReport {
            n: self.n,
            total_bits,
            per_symbol: total_bits / self.n as f64,
            message_rate: rate,
            h_a: self.h_a,
            h_a_given_e: self.h_a_given_e,
            floor: self.h_a_given_e - rate,
            target_delta: None,
            mode,
            samples,
        }
    }
}

fn plogp_sum(masses: impl Iterator<Item = f64>, total: f64) -> f64 {
    masses.filter(|&m| m > 0.0).map(|m| -m * (m / total).log2()).sum()
}

/// sum over a of -w log(w/pe) minus the same over message groups: equals
/// p(e) * H(A^N | M, E^N = e).
fn contribution(w: &[f64], message_of: &[u32], groups: usize, scratch: &mut Vec<f64>) -> (f64, f64) {
    let pe: f64 = w.iter().sum();
    if pe <= 0.0 {
        return (0.0, 0.0);
    }
    scratch.clear();
    scratch.resize(groups, 0.0);
    for (&m, &x) in message_of.iter().zip(w) {
        scratch[m as usize] += x;
    }
    let h_joint = plogp_sum(w.iter().copied(), pe);
    let h_msg = plogp_sum(scratch.iter().copied(), pe);
    (pe, (h_joint - h_msg).max(0.0))
}

/// Equivocation of a deterministic encoder given as the message of every
/// source sequence (indexed first symbol most significant).
pub fn equivocation_of_messages(
    source: &JointDistribution,
    n: usize,
    messages: &[u64],
    message_space: f64,
    seed: u64,
) -> Result<EquivocationReport> {
    let model = SourceModel::new(source, n)?;
    if messages.len() as u64 != model.a_count() {
        return Err(Error::LengthMismatch {
            expected: model.a_count() as usize,
            actual: messages.len(),
        });
    }
    // compact message ids
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let message_of: Vec<u32> = messages
        .iter()
        .map(|m| {
            let next = ids.len() as u32;
            *ids.entry(*m).or_insert(next)
        })
        .collect();
    let groups = ids.len();
    if (groups as f64) > message_space + 0.5 {
        return Err(Error::InvalidArgument(format!(
            "{groups} distinct messages exceed the declared space {message_space}"
        )));
    }
    let mut row = Vec::new();
    let mut scratch = Vec::new();
    let exact = model.a_count().saturating_mul(model.e_count()) <= EXACT_LIMIT;
    let report = if exact {
        let mut total = 0.0;
        for e_idx in 0..model.e_count() {
            model.joint_row(&sequence_at(e_idx, model.ne, n), &mut row);
            total += contribution(&row, &message_of, groups, &mut scratch).1;
        }
        model.report(total, message_space, EquivocationMode::Exact, None)
    } else {
        let mut rng = rng_for(seed, stream::EVE_SAMPLES, 0);
        let mut acc = 0.0;
        for _ in 0..MC_SAMPLES {
            let e_seq = model.draw_e(&mut rng);
            model.joint_row(&e_seq, &mut row);
            let (pe, c) = contribution(&row, &message_of, groups, &mut scratch);
            if pe > 0.0 {
                acc += c / pe;
            }
        }
        model.report(acc / MC_SAMPLES as f64, message_space, EquivocationMode::MonteCarloEstimate, Some(MC_SAMPLES))
    };
    report.check_invariants()?;
    Ok(report)
}

/// Equivocation of a keyed encoder m = encode(a^N index, key index) with an
/// independent key. Exact evaluation only.
pub fn keyed_equivocation<F>(
    source: &JointDistribution,
    n: usize,
    key: &[f64],
    message_space: f64,
    encode: F,
) -> Result<EquivocationReport>
where
    F: Fn(u64, usize) -> u64,
{
    let model = SourceModel::new(source, n)?;
    let states = model
        .a_count()
        .saturating_mul(model.e_count())
        .saturating_mul(key.len() as u64);
    if states > EXACT_LIMIT {
        return Err(Error::TooLarge(format!("{states} joint states exceed {EXACT_LIMIT}")));
    }
    let mut row = Vec::new();
    let mut total = 0.0;
    for e_idx in 0..model.e_count() {
        model.joint_row(&sequence_at(e_idx, model.ne, n), &mut row);
        let pe: f64 = row.iter().sum();
        if pe <= 0.0 {
            continue;
        }
        let mut am: HashMap<(u64, u64), f64> = HashMap::new();
        let mut mm: HashMap<u64, f64> = HashMap::new();
        for (a, &w) in row.iter().enumerate() {
            for (k, &pk) in key.iter().enumerate() {
                let m = encode(a as u64, k);
                *am.entry((a as u64, m)).or_default() += w * pk;
                *mm.entry(m).or_default() += w * pk;
            }
        }
        let mut pairs: Vec<_> = am.into_iter().collect();
        pairs.sort_by_key(|(k, _)| *k);
        let mut msgs: Vec<_> = mm.into_iter().collect();
        msgs.sort_by_key(|(k, _)| *k);
        let h_am = plogp_sum(pairs.iter().map(|(_, v)| *v), pe);
        let h_m = plogp_sum(msgs.iter().map(|(_, v)| *v), pe);
        total += (h_am - h_m).max(0.0);
    }
    let report = model.report(total, message_space, EquivocationMode::Exact, None);
    report.check_invariants()?;
    Ok(report)
}

/// Uniform A and a uniform key of the same length, message a XOR k.
pub fn one_time_pad(source: &JointDistribution, n: usize) -> Result<EquivocationReport> {
    let na = source.axis(A)?.size();
    if na != 2 {
        return Err(Error::InvalidArgument("the pad is defined for binary A".into()));
    }
    let keys = 1usize << n;
    let key = vec![1.0 / keys as f64; keys];
    keyed_equivocation(source, n, &key, keys as f64, |a, k| a ^ k as u64)
}

/// Messages of the planned scheme for every source sequence.
pub fn scheme_messages(cfg: &SchemeConfig, cb: &Codebooks) -> Result<Vec<u64>> {
    let coder = Coder::new(cfg)?;
    let na = cfg.alphabet(A);
    (0..cfg.source_sequences())
        .map(|idx| {
            let out = coder.encode_alice(cb, &sequence_at(idx, na, cfg.n))?;
            Ok(out.aux_bin * cfg.counts.source_bins + out.source_bin)
        })
        .collect()
}

/// H(A^N | f_A(A^N), E^N) of the planned scheme, exact when small enough.
pub fn exact_equivocation(cfg: &SchemeConfig, cb: &Codebooks) -> Result<EquivocationReport> {
    let messages = scheme_messages(cfg, cb)?;
    let space = cfg.counts.aux_bins as f64 * cfg.counts.source_bins as f64;
    let mut report = equivocation_of_messages(&cfg.extended, cfg.n, &messages, space, cfg.seed)?;
    let j = &cfg.extended;
    report.target_delta = Some(positive_part(j.mi(&[A], &[V], &[U])? - j.mi(&[A], &[E], &[U])?));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::Channel;

    fn uniform_with_const_e() -> JointDistribution {
        JointDistribution::uniform(A, 2)
            .unwrap()
            .attach_channel(&Channel::constant(A, E, 2).unwrap(), A)
            .unwrap()
    }

    #[test]
    fn pad_is_perfect() {
        let r = one_time_pad(&uniform_with_const_e(), 4).unwrap();
        assert!((r.per_symbol - 1.0).abs() < 1e-12);
        assert_eq!(r.mode, EquivocationMode::Exact);
    }

    #[test]
    fn identity_message_reveals_everything() {
        let msgs: Vec<u64> = (0..16).collect();
        let r = equivocation_of_messages(&uniform_with_const_e(), 4, &msgs, 16.0, 0).unwrap();
        assert!(r.per_symbol.abs() < 1e-12);
    }

    #[test]
    fn constant_message_leaves_conditional_entropy() {
        let j = JointDistribution::uniform(A, 2)
            .unwrap()
            .attach_channel(&Channel::bsc(A, E, 0.2).unwrap(), A)
            .unwrap();
        let r = equivocation_of_messages(&j, 5, &[0; 32], 1.0, 0).unwrap();
        let want = j.h(&["A"], &["E"]).unwrap();
        assert!((r.per_symbol - want).abs() < 1e-12);
    }

    #[test]
    fn parity_message_on_noisy_eve() {
        // m = parity of a^3: leaks exactly one bit, H(A^3|M) = 2 without E
        let j = JointDistribution::uniform(A, 2)
            .unwrap()
            .attach_channel(&Channel::constant(A, E, 2).unwrap(), A)
            .unwrap();
        let msgs: Vec<u64> = (0..8u64).map(|a| (a.count_ones() % 2) as u64).collect();
        let r = equivocation_of_messages(&j, 3, &msgs, 2.0, 0).unwrap();
        assert!((r.total_bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_many_messages_rejected() {
        let msgs: Vec<u64> = (0..16).collect();
        assert!(equivocation_of_messages(&uniform_with_const_e(), 4, &msgs, 4.0, 0).is_err());
    }
}
