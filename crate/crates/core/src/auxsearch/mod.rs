//! Searches over the auxiliary variables: channels p(U|A) and deterministic
//! maps V = g(C) with H(C|A,V) = 0.

mod frontier;
mod objective;
mod oracle;
mod search;
mod vmap;

pub use frontier::{trace_inner_frontier, FrontierGrid};
pub use objective::{Bracket, UObjective, WeightedMinBracket};
pub use oracle::{oracle_grid_u, GridOptimum};
pub use search::{
    default_card_u, maximize_delta_nested, maximize_delta_uncoded, maximize_delta_uncoded_from,
    maximize_u, AuxChannelU, SearchBudget, SearchOutcome, UncodedOptimum, MERGE_TOL, TIE_TOL,
};
pub use vmap::{enumerate_vmaps, VMap, MAX_C_FOR_ENUMERATION, VMAP_TOL};
