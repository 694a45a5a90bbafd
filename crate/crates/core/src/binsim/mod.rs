//! Block-level simulation of the double-binning scheme: random codebooks,
//! typicality encoders, Bob's three-step decoder, Monte Carlo error rates
//! and exact equivocation at small block lengths.

mod coding;
mod equivocation;
mod experiment;
mod scheme;
mod typical;

pub use coding::{
    estimate_error, wilson_interval, AliceOutput, BobOutput, CharlieOutput, Coder, DecodeStage, ErrorEstimate,
    FailureBreakdown, Message,
};
pub use equivocation::{
    equivocation_of_messages, exact_equivocation, keyed_equivocation, one_time_pad, scheme_messages,
    EquivocationMode, EquivocationReport, EXACT_LIMIT, MC_SAMPLES,
};
pub use experiment::{run_experiment, ExperimentReport, TheorySummary};
pub use scheme::{
    generate_codebooks, plan_scheme, sequence_at, sequence_index, BinCounts, Codebooks, Margins, SchemeConfig,
    SchemeTerms, DEFAULT_DELTA, MAX_LOG2_COUNT, MAX_SOURCE_SEQUENCES,
};
pub use typical::TypicalityTest;
