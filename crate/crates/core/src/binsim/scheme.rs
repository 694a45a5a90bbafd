use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auxsearch::{AuxChannelU, VMap};
use crate::error::{Error, Result};
use crate::probcore::{Channel, JointDistribution};
use crate::regions::extend_with_aux;
use crate::seeds::{derive_seed, mix64, rng_for, stream};
use crate::vars::{A, C, E, U, V};

/// Largest log2 of any codebook or bin count.
pub const MAX_LOG2_COUNT: f64 = 26.0;
/// Largest |A|^N; source bins are materialized as member lists.
pub const MAX_SOURCE_SEQUENCES: u64 = 1 << 24;
/// Largest total codeword storage in symbols.
pub const MAX_CODEBOOK_SYMBOLS: u64 = 1 << 28;

/// Rate slacks (eps1..eps4) in bits added to each exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Margins {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self::uniform(0.2)
    }
}

impl Margins {
    pub fn uniform(eps: f64) -> Self {
        Self {
            eps1: eps,
            eps2: eps,
            eps3: eps,
            eps4: eps,
        }
    }

    pub fn all(&self) -> [f64; 4] {
        [self.eps1, self.eps2, self.eps3, self.eps4]
    }
}

pub const DEFAULT_DELTA: f64 = 0.15;

/// Information quantities that set the codebook exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeTerms {
    pub i_au: f64,
    pub i_au_given_v: f64,
    pub h_a_given_vu: f64,
    pub i_cv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinCounts {
    pub u_codebook: u64,
    pub aux_bins: u64,
    pub source_bins: u64,
    pub v_codebook: u64,
}

/// A fully planned binning scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n: usize,
    pub margins: Margins,
    pub delta: f64,
    pub seed: u64,
    pub u: AuxChannelU,
    pub v: VMap,
    pub terms: SchemeTerms,
    pub counts: BinCounts,
    /// Joint over (A, C, E, U, V); E is constant if the source had none.
    pub extended: JointDistribution,
}

fn ceil_pow2(exponent: f64, what: &str) -> Result<u64> {
    if exponent > MAX_LOG2_COUNT {
        return Err(Error::TooLarge(format!(
            "{what} needs 2^{exponent:.2} entries, limit 2^{MAX_LOG2_COUNT}"
        )));
    }
    Ok((exponent.exp2() - 1e-9).ceil().max(1.0) as u64)
}

fn pow_u64(base: usize, n: usize) -> Option<u64> {
    (base as u64).checked_pow(n as u32)
}

/// Derives codebook and bin sizes for block length `n`.
pub fn plan_scheme(
    source: &JointDistribution,
    u: &AuxChannelU,
    v: &VMap,
    n: usize,
    margins: Margins,
    delta: f64,
    seed: u64,
) -> Result<SchemeConfig> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if margins.all().iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidArgument("margins must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("typicality slack {delta} outside (0, 1)")));
    }
    let source = if source.has(E) {
        source.clone()
    } else {
        source.attach_channel(&Channel::constant(A, E, source.axis(A)?.size())?, A)?
    };
    let extended = extend_with_aux(&source, u, v)?;
    for ax in extended.axes() {
        if ax.size() > u8::MAX as usize {
            return Err(Error::AlphabetTooLarge {
                what: ax.name.clone(),
                size: ax.size(),
                limit: u8::MAX as usize,
            });
        }
    }
    let terms = SchemeTerms {
        i_au: extended.mi(&[A], &[U], &[])?,
        i_au_given_v: extended.mi(&[A], &[U], &[V])?,
        h_a_given_vu: extended.h(&[A], &[V, U])?,
        i_cv: extended.mi(&[C], &[V], &[])?,
    };
    let nf = n as f64;
    let na = extended.axis(A)?.size();
    let sequences = pow_u64(na, n).filter(|&s| s <= MAX_SOURCE_SEQUENCES).ok_or_else(|| {
        Error::TooLarge(format!("|A|^N = {na}^{n} exceeds {MAX_SOURCE_SEQUENCES}"))
    })?;
    // a U carrying no information about A needs one codeword and one bin
    let collapse_u = terms.i_au <= 1e-12;
    let collapse_v = terms.i_cv <= 1e-12;
    let u_codebook = if collapse_u { 1 } else { ceil_pow2(nf * (terms.i_au + margins.eps1), "U codebook")? };
    let aux_bins = if collapse_u {
        1
    } else {
        ceil_pow2(nf * (terms.i_au_given_v + margins.eps2), "auxiliary bins")?.min(u_codebook)
    };
    let source_bins = ceil_pow2(nf * (terms.h_a_given_vu + margins.eps3), "source bins")?.min(sequences);
    let v_codebook = if collapse_v { 1 } else { ceil_pow2(nf * (terms.i_cv + margins.eps4), "V codebook")? };
    if (u_codebook + v_codebook) * n as u64 > MAX_CODEBOOK_SYMBOLS {
        return Err(Error::TooLarge(format!(
            "codebooks need {} symbols, limit {MAX_CODEBOOK_SYMBOLS}",
            (u_codebook + v_codebook) * n as u64
        )));
    }
    Ok(SchemeConfig {
        n,
        margins,
        delta,
        seed,
        u: u.clone(),
        v: v.clone(),
        terms,
        counts: BinCounts {
            u_codebook,
            aux_bins,
            source_bins,
            v_codebook,
        },
        extended,
    })
}

impl SchemeConfig {
    /// Replaces the source-bin count, e.g. to undercode deliberately.
    pub fn with_source_bins(mut self, bins: u64) -> Result<Self> {
        let total = self.source_sequences();
        if bins == 0 || bins > total {
            return Err(Error::InvalidArgument(format!(
                "source-bin count {bins} outside 1..={total}"
            )));
        }
        self.counts.source_bins = bins;
        Ok(self)
    }

    /// log2(aux bins * source bins) / N.
    pub fn alice_rate(&self) -> f64 {
        ((self.counts.aux_bins as f64).log2() + (self.counts.source_bins as f64).log2()) / self.n as f64
    }

    /// |A|^N.
    pub fn source_sequences(&self) -> u64 {
        pow_u64(self.alphabet(A), self.n).expect("checked when planning")
    }

    pub fn alphabet(&self, name: &str) -> usize {
        self.extended.axis(name).map(|a| a.size()).unwrap_or(1)
    }
}

/// Compressed sparse rows: members of each bin in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMembers {
    offsets: Vec<usize>,
    items: Vec<u32>,
}

impl BinMembers {
    fn build(bins: usize, assignment: impl Iterator<Item = usize> + Clone) -> Self {
        let mut offsets = vec![0usize; bins + 1];
        for b in assignment.clone() {
            offsets[b + 1] += 1;
        }
        for i in 0..bins {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut items = vec![0u32; offsets[bins]];
        for (idx, b) in assignment.enumerate() {
            items[cursor[b]] = idx as u32;
            cursor[b] += 1;
        }
        Self { offsets, items }
    }

    pub fn members(&self, bin: usize) -> &[u32] {
        &self.items[self.offsets[bin]..self.offsets[bin + 1]]
    }

    pub fn bins(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Random codebooks and bin assignments for one scheme.
#[derive(Debug, Clone)]
pub struct Codebooks {
    pub n: usize,
    u_words: Vec<u8>,
    v_words: Vec<u8>,
    aux_bin_of: Vec<u32>,
    aux_members: BinMembers,
    source_key: u64,
    source_bins: u64,
    source_members: BinMembers,
    v_index: HashMap<Vec<u8>, u32>,
}

fn draw_words<R: Rng>(rng: &mut R, probs: &[f64], count: u64, n: usize) -> Vec<u8> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (0..count as usize * n)
        .map(|_| {
            let x: f64 = rng.gen::<f64>() * acc;
            cdf.iter().position(|&c| x < c).unwrap_or(last).min(last) as u8
        })
        .collect()
}

/// Uniform bin in 0..bins for sequence `idx`, via a keyed hash.
pub(crate) fn hashed_bin(key: u64, idx: u64, bins: u64) -> u64 {
    ((mix64(key ^ mix64(idx)) as u128 * bins as u128) >> 64) as u64
}

/// Index of a sequence, first symbol most significant.
pub fn sequence_index(seq: &[u8], base: usize) -> u64 {
    seq.iter().fold(0u64, |acc, &s| acc * base as u64 + s as u64)
}

pub fn sequence_at(mut idx: u64, base: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = (idx % base as u64) as u8;
        idx /= base as u64;
    }
    out
}

/// Draws every codebook and bin map from streams keyed by `cfg.seed`.
pub fn generate_codebooks(cfg: &SchemeConfig) -> Result<Codebooks> {
    let n = cfg.n;
    let p_u = cfg.extended.marginal(&[U])?.mass().to_vec();
    let p_v = cfg.extended.marginal(&[V])?.mass().to_vec();
    let u_words = draw_words(&mut rng_for(cfg.seed, stream::U_CODEBOOK, 0), &p_u, cfg.counts.u_codebook, n);
    let v_words = draw_words(&mut rng_for(cfg.seed, stream::V_CODEBOOK, 0), &p_v, cfg.counts.v_codebook, n);
    let mut rng = rng_for(cfg.seed, stream::AUX_BINS, 0);
    let aux_bin_of: Vec<u32> = (0..cfg.counts.u_codebook)
        .map(|_| rng.gen_range(0..cfg.counts.aux_bins) as u32)
        .collect();
    let aux_members = BinMembers::build(cfg.counts.aux_bins as usize, aux_bin_of.iter().map(|&b| b as usize));
    let source_key = derive_seed(cfg.seed, stream::SOURCE_BINS, 0);
    let source_bins = cfg.counts.source_bins;
    let source_members = BinMembers::build(
        source_bins as usize,
        (0..cfg.source_sequences()).map(|i| hashed_bin(source_key, i, source_bins) as usize),
    );
    let mut v_index = HashMap::new();
    for (w, word) in v_words.chunks(n.max(1)).enumerate() {
        v_index.entry(word.to_vec()).or_insert(w as u32);
    }
    Ok(Codebooks {
        n,
        u_words,
        v_words,
        aux_bin_of,
        aux_members,
        source_key,
        source_bins,
        source_members,
        v_index,
    })
}

impl Codebooks {
    pub fn u_word(&self, w: usize) -> &[u8] {
        &self.u_words[w * self.n..(w + 1) * self.n]
    }

    pub fn v_word(&self, w: usize) -> &[u8] {
        &self.v_words[w * self.n..(w + 1) * self.n]
    }

    pub fn u_len(&self) -> usize {
        self.aux_bin_of.len()
    }

    pub fn v_len(&self) -> usize {
        self.v_words.len() / self.n.max(1)
    }

    pub fn aux_bin_of(&self, w1: usize) -> u32 {
        self.aux_bin_of[w1]
    }

    pub fn aux_bin_members(&self, bin: usize) -> &[u32] {
        self.aux_members.members(bin)
    }

    pub fn source_bin_of(&self, a_index: u64) -> u64 {
        hashed_bin(self.source_key, a_index, self.source_bins)
    }

    pub fn source_bin_members(&self, bin: usize) -> &[u32] {
        self.source_members.members(bin)
    }

    pub fn aux_bins(&self) -> usize {
        self.aux_members.bins()
    }

    pub fn source_bins(&self) -> usize {
        self.source_members.bins()
    }

    /// First V codeword equal to `word`.
    pub fn v_lookup(&self, word: &[u8]) -> Option<u32> {
        self.v_index.get(word).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dsbs() -> JointDistribution {
        JointDistribution::from_sizes(&[(A, 2), (C, 2)], vec![0.45, 0.05, 0.05, 0.45]).unwrap()
    }

    #[test]
    fn dsbs_source_bin_count() {
        let m = Margins {
            eps3: 0.25,
            ..Margins::default()
        };
        let cfg = plan_scheme(&dsbs(), &AuxChannelU::constant(2), &VMap::identity(2), 8, m, 0.15, 0).unwrap();
        assert_eq!(cfg.counts.source_bins, 54);
        assert_eq!(cfg.counts.aux_bins, 1);
        assert_eq!(cfg.counts.u_codebook, 1);
    }

    #[test]
    fn copy_source_bins() {
        let j = JointDistribution::from_sizes(&[(A, 2), (C, 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let cfg = plan_scheme(&j, &AuxChannelU::constant(2), &VMap::identity(2), 10, Margins::default(), 0.15, 0)
            .unwrap();
        assert_eq!(cfg.counts.source_bins, 4); // ceil(2^2)
    }

    #[test]
    fn guards() {
        let u = AuxChannelU::constant(2);
        let v = VMap::identity(2);
        assert!(matches!(
            plan_scheme(&dsbs(), &u, &v, 30, Margins::default(), 0.15, 0),
            Err(Error::TooLarge(_))
        ));
        assert!(plan_scheme(&dsbs(), &u, &v, 0, Margins::default(), 0.15, 0).is_err());
        assert!(plan_scheme(&dsbs(), &u, &v, 4, Margins::uniform(0.0), 0.15, 0).is_err());
        assert!(plan_scheme(&dsbs(), &u, &v, 4, Margins::default(), 1.0, 0).is_err());
        assert!(matches!(
            plan_scheme(&dsbs(), &u, &VMap::merge_all(2), 4, Margins::default(), 0.15, 0),
            Err(Error::NotInPin(_))
        ));
    }

    #[test]
    fn codebooks_deterministic_and_binned() {
        let u = AuxChannelU::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let cfg = plan_scheme(&dsbs(), &u, &VMap::identity(2), 8, Margins::default(), 0.15, 7).unwrap();
        let a = generate_codebooks(&cfg).unwrap();
        let b = generate_codebooks(&cfg).unwrap();
        assert_eq!(a.u_words, b.u_words);
        assert_eq!(a.aux_bin_of, b.aux_bin_of);
        let total: usize = (0..a.source_bins()).map(|s| a.source_bin_members(s).len()).sum();
        assert_eq!(total as u64, cfg.source_sequences());
        for s in 0..a.source_bins() {
            for &m in a.source_bin_members(s) {
                assert_eq!(a.source_bin_of(m as u64), s as u64);
            }
        }
    }

    #[test]
    fn constant_u_codewords_identical() {
        let cfg = plan_scheme(
            &dsbs(),
            &AuxChannelU::constant(2).padded(3),
            &VMap::identity(2),
            6,
            Margins::default(),
            0.15,
            1,
        )
        .unwrap();
        let cb = generate_codebooks(&cfg).unwrap();
        assert!(cb.u_words.iter().all(|&s| s == 0));
    }

    #[test]
    fn sequence_roundtrip() {
        let s = vec![1, 0, 2, 2];
        assert_eq!(sequence_at(sequence_index(&s, 3), 3, 4), s);
    }
}
