//! Rate regions as explicit inequality systems.

mod descriptor;
mod frontier;
mod special;
mod theorem;

pub use descriptor::{
    contains, AuxWitness, Coord, Inequality, Membership, PointShape, RatePair, RatePoint,
    RateTriple, RegionDescriptor, RegionKind, Semantics, Sense, REGION_TOL,
};
pub use frontier::{convexify, FrontierPoint, FrontierSamples, Provenance, LAMBDA_STEP};
pub use special::{
    corollary1_region, corollary2_region, corollary3_region, corollary4_best, corollary4_region,
    corollary5_best, corollary5_region, count_indexed, eve_si_regions, lemma1_region, EvePlacement,
    UInput, MARKOV_TOL,
};
pub use theorem::{
    candidate_constants, extend_with_aux, inner_point, outer_from, outer_overapprox,
    theorem1_inner_region, theorem1_outer_from, theorem1_outer_region, InnerPointReport, OuterBound, PointEvaluation,
    PointStatus, SourceTerms, TheoremEvaluator, VCandidate, LABEL_DELTA, LABEL_RA, LABEL_RC,
    RATE_TOL,
};
