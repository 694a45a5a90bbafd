//! Frontier samples over an (R_A, R_C) grid and their time-sharing
//! convexification.

use serde::{Deserialize, Serialize};

/// Mixture weights tried for every pair of points.
pub const LAMBDA_STEP: f64 = 0.05;
// Chained mixtures close the slack of the lambda grid geometrically, which can
// take ~100 passes; each pass only continues while some value improves.
const MAX_PASSES: usize = 512;
const IMPROVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Provenance {
    /// Evaluated directly at auxiliary variables (U rows, V partition).
    Aux {
        u: Vec<Vec<f64>>,
        v: Vec<usize>,
    },
    /// lambda * point i + (1 - lambda) * point j, indices into the samples.
    TimeShared { i: usize, j: usize, lambda: f64 },
    /// A point with no larger rates and a larger Delta.
    Dominated { by: usize },
    /// No admissible auxiliary pair at these rates.
    Infeasible,
}

impl Provenance {
    pub fn describe(&self) -> String {
        match self {
            Provenance::Aux { v, .. } => format!(
                "aux(v={})",
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join("")
            ),
            Provenance::TimeShared { i, j, lambda } => format!("time-shared({i},{j},{lambda:.2})"),
            Provenance::Dominated { by } => format!("dominated-by({by})"),
            Provenance::Infeasible => "infeasible".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub ra: f64,
    pub rc: f64,
    /// Largest Delta found at these rates, `None` if nothing is achievable.
    pub delta: Option<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierSamples {
    pub points: Vec<FrontierPoint>,
    pub convexified: bool,
}

impl FrontierSamples {
    pub fn new(points: Vec<FrontierPoint>) -> Self {
        Self {
            points,
            convexified: false,
        }
    }
}

fn lambdas() -> impl Iterator<Item = f64> {
    let steps = (1.0 / LAMBDA_STEP).round() as usize;
    (0..=steps).map(move |k| k as f64 / steps as f64)
}

/// Upper-concave envelope of Delta over the sample grid.
///
/// Rates can always be raised without losing Delta, so a mixture of two
/// points improves every sample whose rates are at least the mixture's.
/// Passes repeat until nothing changes, which makes the operation
/// idempotent.
pub fn convexify(samples: &FrontierSamples) -> FrontierSamples {
    let mut cur = samples.points.clone();
    let n = cur.len();
    for _ in 0..MAX_PASSES {
        let base = cur.clone();
        let mut changed = false;
        for i in 0..n {
            let Some(di) = base[i].delta else { continue };
            for j in i..n {
                let Some(dj) = base[j].delta else { continue };
                for lambda in lambdas() {
                    if i == j && lambda > 0.0 {
                        break;
                    }
                    let ra = lambda * base[i].ra + (1.0 - lambda) * base[j].ra;
                    let rc = lambda * base[i].rc + (1.0 - lambda) * base[j].rc;
                    let d = lambda * di + (1.0 - lambda) * dj;
                    for (g, pt) in cur.iter_mut().enumerate() {
                        if ra <= pt.ra + IMPROVE_TOL
                            && rc <= pt.rc + IMPROVE_TOL
                            && pt.delta.is_none_or(|x| d > x + IMPROVE_TOL)
                        {
                            pt.delta = Some(d);
                            pt.provenance = if lambda == 0.0 || lambda == 1.0 || i == j {
                                let by = if lambda == 1.0 { i } else { j };
                                if by == g {
                                    continue;
                                }
                                Provenance::Dominated { by }
                            } else {
                                Provenance::TimeShared { i, j, lambda }
                            };
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    FrontierSamples {
        points: cur,
        convexified: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(ra: f64, rc: f64, delta: Option<f64>) -> FrontierPoint {
        FrontierPoint {
            ra,
            rc,
            delta,
            provenance: if delta.is_some() {
                Provenance::Aux { u: vec![], v: vec![] }
            } else {
                Provenance::Infeasible
            },
        }
    }

    #[test]
    fn single_point_unchanged() {
        let s = FrontierSamples::new(vec![pt(0.3, 0.4, Some(0.2))]);
        assert_eq!(convexify(&s).points, s.points);
    }

    #[test]
    fn equal_rates_keep_larger_delta() {
        let s = FrontierSamples::new(vec![pt(1.0, 1.0, Some(0.2)), pt(1.0, 1.0, Some(0.4))]);
        let c = convexify(&s);
        assert!(c.points.iter().all(|p| p.delta == Some(0.4)));
        assert_eq!(c.points[0].provenance, Provenance::Dominated { by: 1 });
    }

    #[test]
    fn midpoint_gets_mixture() {
        let s = FrontierSamples::new(vec![
            pt(0.0, 0.0, Some(0.0)),
            pt(0.5, 0.0, None),
            pt(1.0, 0.0, Some(0.8)),
        ]);
        let c = convexify(&s);
        let mid = c.points[1].delta.unwrap();
        assert!(mid >= 0.4 - 1e-12, "{mid}");
        assert!(matches!(c.points[1].provenance, Provenance::TimeShared { .. }));
    }

    #[test]
    fn idempotent_and_dominating() {
        let mut pts = Vec::new();
        for (k, d) in [0.0, 0.05, 0.5, 0.52, 0.9, 0.91].iter().enumerate() {
            pts.push(pt(k as f64 * 0.2, 1.0 - k as f64 * 0.1, Some(*d)));
        }
        let s = FrontierSamples::new(pts);
        let c1 = convexify(&s);
        let c2 = convexify(&c1);
        for (a, b) in c1.points.iter().zip(&c2.points) {
            assert!((a.delta.unwrap() - b.delta.unwrap()).abs() <= 1e-12);
        }
        for (a, b) in s.points.iter().zip(&c1.points) {
            assert!(b.delta.unwrap() >= a.delta.unwrap() - 1e-12);
        }
    }
}
