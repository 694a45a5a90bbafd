use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scheme::{sequence_index, Codebooks, SchemeConfig};
use super::typical::TypicalityTest;
use crate::error::{Error, Result};
use crate::seeds::{rng_for, stream};
use crate::vars::{A, C, U, V};

/// What Bob receives: Alice's two bin indices and Charlie's codeword index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub aux_bin: u64,
    pub source_bin: u64,
    pub w2: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliceOutput {
    pub w1: u64,
    pub aux_bin: u64,
    pub source_bin: u64,
    pub failure: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharlieOutput {
    pub w2: u64,
    pub failure: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeStage {
    /// No unique U codeword in the auxiliary bin.
    AuxCodeword,
    /// No unique source sequence in the source bin.
    SourceSequence,
    /// Some (a, v) pair has no C preimage.
    Reconstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BobOutput {
    pub a_hat: Vec<u8>,
    pub c_hat: Vec<u8>,
    pub failure: Option<DecodeStage>,
}

/// Typicality tests and lookup tables shared by all coding steps.
#[derive(Debug, Clone)]
pub struct Coder {
    n: usize,
    na: usize,
    a: TypicalityTest,
    au: TypicalityTest,
    cv: TypicalityTest,
    uv: TypicalityTest,
    auv: TypicalityTest,
    v_of_c: Vec<u8>,
    /// (a, v) -> c, or None for pairs of zero probability.
    c_of_av: Vec<Option<u8>>,
    nv: usize,
}

impl Coder {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let j = &cfg.extended;
        let d = cfg.delta;
        let na = cfg.alphabet(A);
        let nc = cfg.alphabet(C);
        let nv = cfg.alphabet(V);
        let p_ac = j.marginal(&[A, C])?;
        let mut c_of_av = vec![None; na * nv];
        for a in 0..na {
            for c in 0..nc {
                if p_ac.prob(&[a, c]) > 0.0 {
                    c_of_av[a * nv + cfg.v.apply(c)] = Some(c as u8);
                }
            }
        }
        Ok(Self {
            n: cfg.n,
            na,
            a: TypicalityTest::new(j, &[A], d)?,
            au: TypicalityTest::new(j, &[A, U], d)?,
            cv: TypicalityTest::new(j, &[C, V], d)?,
            uv: TypicalityTest::new(j, &[U, V], d)?,
            auv: TypicalityTest::new(j, &[A, U, V], d)?,
            v_of_c: (0..nc).map(|c| cfg.v.apply(c) as u8).collect(),
            c_of_av,
            nv,
        })
    }

    fn check_len(&self, seq: &[u8]) -> Result<()> {
        if seq.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: seq.len(),
            });
        }
        Ok(())
    }

    /// Smallest w1 whose codeword is jointly typical with `a_seq`. On
    /// failure the message still carries w1 = 0.
    pub fn encode_alice(&self, cb: &Codebooks, a_seq: &[u8]) -> Result<AliceOutput> {
        self.check_len(a_seq)?;
        let source_bin = cb.source_bin_of(sequence_index(a_seq, self.na));
        let found = if self.a.is_typical(&[a_seq]) {
            (0..cb.u_len()).find(|&w| self.au.is_typical(&[a_seq, cb.u_word(w)]))
        } else {
            None
        };
        let w1 = found.unwrap_or(0);
        Ok(AliceOutput {
            w1: w1 as u64,
            aux_bin: cb.aux_bin_of(w1) as u64,
            source_bin,
            failure: found.is_none(),
        })
    }

    /// Charlie's codeword must equal g(c^N) symbol by symbol, so the
    /// smallest such index is a table lookup.
    pub fn encode_charlie(&self, cb: &Codebooks, c_seq: &[u8]) -> Result<CharlieOutput> {
        self.check_len(c_seq)?;
        let image: Vec<u8> = c_seq.iter().map(|&c| self.v_of_c[c as usize]).collect();
        let found = cb
            .v_lookup(&image)
            .filter(|&w| self.cv.is_typical(&[c_seq, cb.v_word(w as usize)]));
        Ok(CharlieOutput {
            w2: found.unwrap_or(0) as u64,
            failure: found.is_none(),
        })
    }

    pub fn decode_bob(&self, cb: &Codebooks, msg: &Message) -> Result<BobOutput> {
        let check = |what: &'static str, index: u64, size: usize| {
            if index >= size as u64 {
                Err(Error::IndexOutOfRange {
                    what,
                    index,
                    size: size as u64,
                })
            } else {
                Ok(())
            }
        };
        check("auxiliary bin", msg.aux_bin, cb.aux_bins())?;
        check("source bin", msg.source_bin, cb.source_bins())?;
        check("V codeword", msg.w2, cb.v_len())?;
        let fail = |stage| BobOutput {
            a_hat: Vec::new(),
            c_hat: Vec::new(),
            failure: Some(stage),
        };
        let v = cb.v_word(msg.w2 as usize);

        let mut u_hit = None;
        for &w in cb.aux_bin_members(msg.aux_bin as usize) {
            if self.uv.is_typical(&[cb.u_word(w as usize), v]) {
                if u_hit.is_some() {
                    return Ok(fail(DecodeStage::AuxCodeword));
                }
                u_hit = Some(w);
            }
        }
        let Some(w1) = u_hit else {
            return Ok(fail(DecodeStage::AuxCodeword));
        };
        let u = cb.u_word(w1 as usize);

        let mut a_hit: Option<Vec<u8>> = None;
        let mut buf = vec![0u8; self.n];
        for &idx in cb.source_bin_members(msg.source_bin as usize) {
            let mut x = idx as u64;
            for slot in buf.iter_mut().rev() {
                *slot = (x % self.na as u64) as u8;
                x /= self.na as u64;
            }
            if self.auv.is_typical(&[&buf, u, v]) {
                if a_hit.is_some() {
                    return Ok(fail(DecodeStage::SourceSequence));
                }
                a_hit = Some(buf.clone());
            }
        }
        let Some(a_hat) = a_hit else {
            return Ok(fail(DecodeStage::SourceSequence));
        };

        let mut c_hat = Vec::with_capacity(self.n);
        for (&a, &vv) in a_hat.iter().zip(v) {
            match self.c_of_av[a as usize * self.nv + vv as usize] {
                Some(c) => c_hat.push(c),
                None => return Ok(fail(DecodeStage::Reconstruction)),
            }
        }
        Ok(BobOutput {
            a_hat,
            c_hat,
            failure: None,
        })
    }
}

/// Counts of first failing stage over all trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FailureBreakdown {
    pub encoder: u64,
    pub aux_codeword: u64,
    pub source_sequence: u64,
    pub reconstruction: u64,
    /// Decoding finished but returned the wrong pair.
    pub wrong_output: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub trials: u64,
    pub errors: u64,
    pub p_e: f64,
    /// Wilson score interval at 95%.
    pub wilson_95: (f64, f64),
    pub breakdown: FailureBreakdown,
}

/// Wilson score interval for `k` successes out of `n` at z = 1.96.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let centre = (p + z * z / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Samples (a^N, c^N) i.i.d. from the source.
fn draw_source<R: Rng>(rng: &mut R, p_ac: &[f64], nc: usize, n: usize) -> (Vec<u8>, Vec<u8>) {
    let mut a = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = p_ac.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for (i, &p) in p_ac.iter().enumerate() {
            acc += p;
            if x < acc && p > 0.0 {
                pick = i;
                break;
            }
        }
        a.push((pick / nc) as u8);
        c.push((pick % nc) as u8);
    }
    (a, c)
}

/// Monte Carlo block error rate. Trial `t` draws from its own stream, so
/// results do not depend on execution order.
pub fn estimate_error(cfg: &SchemeConfig, cb: &Codebooks, trials: u64) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let coder = Coder::new(cfg)?;
    let p_ac = cfg.extended.marginal(&[A, C])?.mass().to_vec();
    let nc = cfg.alphabet(C);
    let mut breakdown = FailureBreakdown::default();
    for t in 0..trials {
        let mut rng = rng_for(cfg.seed, stream::TRIAL, t);
        let (a, c) = draw_source(&mut rng, &p_ac, nc, cfg.n);
        let alice = coder.encode_alice(cb, &a)?;
        let charlie = coder.encode_charlie(cb, &c)?;
        if alice.failure || charlie.failure {
            breakdown.encoder += 1;
            continue;
        }
        let msg = Message {
            aux_bin: alice.aux_bin,
            source_bin: alice.source_bin,
            w2: charlie.w2,
        };
        let out = coder.decode_bob(cb, &msg)?;
        match out.failure {
            Some(DecodeStage::AuxCodeword) => breakdown.aux_codeword += 1,
            Some(DecodeStage::SourceSequence) => breakdown.source_sequence += 1,
            Some(DecodeStage::Reconstruction) => breakdown.reconstruction += 1,
            None if out.a_hat != a || out.c_hat != c => breakdown.wrong_output += 1,
            None => {}
        }
    }
    let errors = breakdown.encoder
        + breakdown.aux_codeword
        + breakdown.source_sequence
        + breakdown.reconstruction
        + breakdown.wrong_output;
    Ok(ErrorEstimate {
        trials,
        errors,
        p_e: errors as f64 / trials as f64,
        wilson_95: wilson_interval(errors, trials),
        breakdown,
    })
}
