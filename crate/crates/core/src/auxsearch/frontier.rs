use serde::{Deserialize, Serialize};

use super::search::SearchBudget;
use crate::error::{Error, Result};
use crate::probcore::JointDistribution;
use crate::regions::{
    convexify, FrontierPoint, FrontierSamples, PointEvaluation, PointStatus, Provenance, TheoremEvaluator,
};

/// Inner-bound frontier on a rate grid, before and after time sharing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierGrid {
    /// Row-major over (ra_grid, rc_grid).
    pub evaluations: Vec<PointEvaluation>,
    pub raw: FrontierSamples,
    pub convexified: FrontierSamples,
}

/// Best certified Delta at every (R_A, R_C) in the grid, maximizing over
/// admissible V and searched U.
pub fn trace_inner_frontier(
    j_ace: &JointDistribution,
    card_u: usize,
    ra_grid: &[f64],
    rc_grid: &[f64],
    budget: &SearchBudget,
) -> Result<FrontierGrid> {
    if ra_grid.is_empty() || rc_grid.is_empty() {
        return Err(Error::InvalidArgument("rate grids must be nonempty".into()));
    }
    if ra_grid.iter().chain(rc_grid).any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidArgument("rates must be finite and nonnegative".into()));
    }
    let ev = TheoremEvaluator::inner(j_ace, card_u, budget)?;
    let mut evaluations = Vec::with_capacity(ra_grid.len() * rc_grid.len());
    let mut points = Vec::with_capacity(evaluations.capacity());
    for &ra in ra_grid {
        for &rc in rc_grid {
            let pe = ev.evaluate(ra, rc);
            let provenance = match (pe.status, pe.witness) {
                (PointStatus::Achievable, Some(i)) => {
                    let c = &ev.candidates[i];
                    Provenance::Aux {
                        u: c.u.rows().to_vec(),
                        v: c.v.partition().to_vec(),
                    }
                }
                _ => Provenance::Infeasible,
            };
            points.push(FrontierPoint {
                ra,
                rc,
                delta: pe.delta,
                provenance,
            });
            evaluations.push(pe);
        }
    }
    let raw = FrontierSamples::new(points);
    let convexified = convexify(&raw);
    Ok(FrontierGrid {
        evaluations,
        raw,
        convexified,
    })
}
