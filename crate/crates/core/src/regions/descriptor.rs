use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::auxsearch::{AuxChannelU, VMap};
use crate::error::{Error, Result};

/// Slack on every region inequality.
pub const REGION_TOL: f64 = 1e-9;

/// (R_A, R_C, Delta) in bits per source symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub ra: f64,
    pub rc: f64,
    pub delta: f64,
}

/// (R_A, Delta) for settings where Bob's side information is uncoded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub ra: f64,
    pub delta: f64,
}

/// A point to test against a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RatePoint {
    Triple(RateTriple),
    Pair(RatePair),
    /// One equivocation per eavesdropper.
    MultiDelta { ra: f64, deltas: Vec<f64> },
}

impl RatePoint {
    pub fn triple(ra: f64, rc: f64, delta: f64) -> Self {
        RatePoint::Triple(RateTriple { ra, rc, delta })
    }

    pub fn pair(ra: f64, delta: f64) -> Self {
        RatePoint::Pair(RatePair { ra, delta })
    }

    fn coords(&self) -> (f64, Option<f64>, Vec<f64>) {
        match self {
            RatePoint::Triple(t) => (t.ra, Some(t.rc), vec![t.delta]),
            RatePoint::Pair(p) => (p.ra, None, vec![p.delta]),
            RatePoint::MultiDelta { ra, deltas } => (*ra, None, deltas.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    Theorem1Inner,
    Theorem1OuterOverapprox,
    Corollary1,
    Corollary2,
    Lemma1,
    EveSiAtBob,
    EveSiAtAlice,
    Corollary3,
    Corollary4,
    Corollary5,
}

impl RegionKind {
    pub const ALL: [RegionKind; 10] = [
        RegionKind::Theorem1Inner,
        RegionKind::Theorem1OuterOverapprox,
        RegionKind::Corollary1,
        RegionKind::Corollary2,
        RegionKind::Lemma1,
        RegionKind::EveSiAtBob,
        RegionKind::EveSiAtAlice,
        RegionKind::Corollary3,
        RegionKind::Corollary4,
        RegionKind::Corollary5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegionKind::Theorem1Inner => "theorem1-inner",
            RegionKind::Theorem1OuterOverapprox => "theorem1-outer-overapprox",
            RegionKind::Corollary1 => "corollary1",
            RegionKind::Corollary2 => "corollary2",
            RegionKind::Lemma1 => "lemma1",
            RegionKind::EveSiAtBob => "eve-si-at-bob",
            RegionKind::EveSiAtAlice => "eve-si-at-alice",
            RegionKind::Corollary3 => "corollary3",
            RegionKind::Corollary4 => "corollary4",
            RegionKind::Corollary5 => "corollary5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// How Delta lower bounds are treated by [`contains`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Every inequality as printed, including lower bounds on Delta.
    #[default]
    AsWritten,
    /// Lower bounds on Delta dropped: any smaller equivocation also counts.
    DeltaDownwardClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coord {
    Ra,
    Rc,
    /// Equivocation of eavesdropper `k` (0 when there is only one).
    Delta(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

/// `sum coeff * coord  (>= | <=)  bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub label: String,
    pub terms: Vec<(Coord, f64)>,
    pub sense: Sense,
    pub bound: f64,
    /// A lower bound on equivocation; dropped under downward closure.
    pub delta_lower: bool,
}

impl Inequality {
    pub fn new(label: impl Into<String>, terms: Vec<(Coord, f64)>, sense: Sense, bound: f64) -> Self {
        Self {
            label: label.into(),
            terms,
            sense,
            bound,
            delta_lower: false,
        }
    }

    pub fn delta_lower(mut self) -> Self {
        self.delta_lower = true;
        self
    }

    fn holds(&self, ra: f64, rc: Option<f64>, deltas: &[f64]) -> bool {
        let lhs: f64 = self
            .terms
            .iter()
            .map(|(c, w)| {
                w * match c {
                    Coord::Ra => ra,
                    Coord::Rc => rc.unwrap_or(0.0),
                    Coord::Delta(k) => deltas[*k],
                }
            })
            .sum();
        match self.sense {
            Sense::Ge => lhs >= self.bound - REGION_TOL,
            Sense::Le => lhs <= self.bound + REGION_TOL,
        }
    }
}

/// Shape of the points a region is defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointShape {
    Triple,
    Pair,
    MultiDelta(usize),
}

/// Auxiliary variables the constants were evaluated at.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxWitness {
    pub u: Option<AuxChannelU>,
    pub v: Option<VMap>,
}

/// A rate region as an explicit system of linear inequalities whose
/// right-hand sides are evaluated information quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDescriptor {
    pub kind: RegionKind,
    /// Named information quantities, all in bits and nonnegative.
    pub constants: BTreeMap<String, f64>,
    pub inequalities: Vec<Inequality>,
    pub shape: PointShape,
    pub aux_witness: AuxWitness,
    pub semantics: Semantics,
}

impl RegionDescriptor {
    pub(crate) fn new(kind: RegionKind, shape: PointShape) -> Self {
        Self {
            kind,
            constants: BTreeMap::new(),
            inequalities: Vec::new(),
            shape,
            aux_witness: AuxWitness::default(),
            semantics: Semantics::AsWritten,
        }
    }

    pub(crate) fn constant(&mut self, name: impl Into<String>, value: f64) -> f64 {
        let v = value.max(0.0);
        self.constants.insert(name.into(), v);
        v
    }

    pub(crate) fn push(&mut self, ineq: Inequality) {
        self.inequalities.push(ineq);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// Labels of the inequalities that fail.
    pub violated: Vec<String>,
}

/// Evaluates every inequality of `rd` at `point` under `rd.semantics`.
pub fn contains(rd: &RegionDescriptor, point: &RatePoint) -> Result<Membership> {
    let ok_shape = matches!(
        (rd.shape, point),
        (PointShape::Triple, RatePoint::Triple(_))
            | (PointShape::Pair, RatePoint::Pair(_))
            | (PointShape::MultiDelta(1), RatePoint::Pair(_))
    ) || matches!((rd.shape, point), (PointShape::MultiDelta(k), RatePoint::MultiDelta { deltas, .. }) if deltas.len() == k);
    if !ok_shape {
        let dim = |s: PointShape| match s {
            PointShape::Triple => 3,
            PointShape::Pair => 2,
            PointShape::MultiDelta(k) => 1 + k,
        };
        let actual = match point {
            RatePoint::Triple(_) => 3,
            RatePoint::Pair(_) => 2,
            RatePoint::MultiDelta { deltas, .. } => 1 + deltas.len(),
        };
        return Err(Error::DimensionMismatch {
            expected: dim(rd.shape),
            actual,
        });
    }
    let (ra, rc, deltas) = point.coords();
    if std::iter::once(ra)
        .chain(rc)
        .chain(deltas.iter().copied())
        .any(|x| !x.is_finite() || x < 0.0)
    {
        return Err(Error::InvalidArgument(
            "rate points must be finite and nonnegative".into(),
        ));
    }
    let violated: Vec<String> = rd
        .inequalities
        .iter()
        .filter(|q| !(q.delta_lower && rd.semantics == Semantics::DeltaDownwardClosed))
        .filter(|q| !q.holds(ra, rc, &deltas))
        .map(|q| q.label.clone())
        .collect();
    Ok(Membership {
        member: violated.is_empty(),
        violated,
    })
}
