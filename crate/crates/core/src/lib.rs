//! Compression-equivocation rate regions for two-encoder distributed source
//! coding with a wiretapped link, and a block-level simulator for the
//! random-binning scheme that achieves them.
//!
//! Alice observes `A`, Charlie observes `C`, Bob must recover both, and Eve
//! sees Alice's message together with her own side information `E`. The
//! crate is organised bottom-up:
//!
//! - [`probcore`]: dense joint distributions, channels, entropies, Markov
//!   residuals and a stochastic-degradedness test.
//! - [`auxsearch`]: searches over auxiliary variables `U` (channels from `A`)
//!   and `V` (deterministic partitions of `C`).
//! - [`regions`]: the inner/outer bounds and every special-case region as
//!   explicit inequality systems, with membership and time-sharing.
//! - [`binsim`]: codebooks, double binning, typicality coding and exact
//!   equivocation at small block lengths.
//! - [`cli`]: JSON configuration, command dispatch and table output used by
//!   the `swsec` binary.
//!
//! All logarithms are base 2.

pub mod auxsearch;
pub mod binsim;
pub mod cli;
pub mod error;
pub mod probcore;
pub mod regions;
pub mod seeds;

pub use error::{Error, Result};

/// Canonical variable names used across the crate.
pub mod vars {
    pub const A: &str = "A";
    pub const B: &str = "B";
    pub const C: &str = "C";
    pub const E: &str = "E";
    pub const U: &str = "U";
    pub const V: &str = "V";

    /// `B1`, `B2`, ... for multi-receiver settings.
    pub fn bk(k: usize) -> String {
        format!("B{k}")
    }

    /// `E1`, `E2`, ... for multi-eavesdropper settings.
    pub fn ek(k: usize) -> String {
        format!("E{k}")
    }
}
