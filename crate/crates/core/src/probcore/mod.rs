//! Exact finite-alphabet probability tables and information measures.

mod alphabet;
mod channel;
mod degraded;
mod info;
mod joint;

pub use alphabet::{Alphabet, Axis};
pub use channel::Channel;
pub use degraded::{degradedness_test, replay_residual, DegradednessVerdict, DEGRADED_TOL};
pub use info::{binary_entropy, entropy_of_masses, positive_part, InfoQuery, CLAMP_TOL};
pub use joint::{ConditionalTable, JointDistribution, NEGATIVE_CLAMP, RENORMALIZE_WINDOW};
