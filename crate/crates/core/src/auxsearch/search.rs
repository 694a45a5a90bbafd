use rand::Rng;
use serde::{Deserialize, Serialize};

use super::objective::{Bracket, UObjective};
use crate::error::{Error, Result};
use crate::probcore::{positive_part, Axis, Channel, JointDistribution};
use crate::seeds::{rng_for, stream};
use crate::vars::{A, B, E, U};

/// U columns whose posteriors p(a|u) agree within this are merged.
pub const MERGE_TOL: f64 = 1e-9;
/// Objective values within this are ties.
pub const TIE_TOL: f64 = 1e-12;

/// Auxiliary channel p(U|A).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxChannelU {
    channel: Channel,
}

impl AuxChannelU {
    pub fn new(channel: Channel) -> Result<Self> {
        Ok(Self {
            channel: Channel::new(
                Axis::new(A, channel.from().alphabet.clone()),
                Axis::new(U, channel.to().alphabet.clone()),
                channel.matrix().to_vec(),
            )?,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self {
            channel: Channel::from_rows(A, U, rows)?,
        })
    }

    /// Single-symbol U.
    pub fn constant(alphabet_a: usize) -> Self {
        Self::from_rows(vec![vec![1.0]; alphabet_a]).expect("constant rows are stochastic")
    }

    /// U = A.
    pub fn copy(alphabet_a: usize) -> Self {
        Self {
            channel: Channel::identity(A, U, alphabet_a).expect("identity is stochastic"),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.channel.to().size()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        self.channel.matrix()
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// Number of U symbols left after dropping unused ones and merging
    /// symbols with identical posteriors.
    pub fn effective_cardinality(&self, p_a: &[f64]) -> usize {
        canonical_rows(self.rows(), p_a).first().map_or(0, Vec::len)
    }

    /// Equivalent channel with unused symbols dropped and posterior-identical
    /// symbols merged. Every bracket objective is unchanged.
    pub fn canonical(&self, p_a: &[f64]) -> Self {
        Self::from_rows(canonical_rows(self.rows(), p_a)).expect("merging keeps rows stochastic")
    }

    /// Same channel padded with never-used symbols up to `card`.
    pub fn padded(&self, card: usize) -> Self {
        let rows = self
            .rows()
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.resize(card.max(r.len()), 0.0);
                r
            })
            .collect();
        Self::from_rows(rows).expect("padding keeps rows stochastic")
    }
}

fn canonical_rows(rows: &[Vec<f64>], p_a: &[f64]) -> Vec<Vec<f64>> {
    let na = rows.len();
    let nu = rows.first().map_or(0, Vec::len);
    // joint p(a,u) columns
    let cols: Vec<Vec<f64>> = (0..nu)
        .map(|u| (0..na).map(|a| p_a[a] * rows[a][u]).collect())
        .collect();
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (u, col) in cols.iter().enumerate() {
        let pu: f64 = col.iter().sum();
        if pu <= 0.0 {
            continue;
        }
        let post: Vec<f64> = col.iter().map(|m| m / pu).collect();
        match groups.iter_mut().find(|(p, _)| {
            p.iter().zip(&post).all(|(x, y)| (x - y).abs() <= MERGE_TOL)
        }) {
            Some((_, members)) => members.push(u),
            None => groups.push((post, vec![u])),
        }
    }
    if groups.is_empty() {
        return vec![vec![1.0]; na];
    }
    (0..na)
        .map(|a| {
            if p_a[a] > 0.0 {
                let row: Vec<f64> = groups
                    .iter()
                    .map(|(_, members)| members.iter().map(|&u| rows[a][u]).sum())
                    .collect();
                let s: f64 = row.iter().sum();
                row.into_iter().map(|w| w / s).collect()
            } else {
                let mut r = vec![0.0; groups.len()];
                r[0] = 1.0;
                r
            }
        })
        .collect()
}

/// Effort and reproducibility controls for randomized searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    /// Simplex step used by grid oracles.
    pub grid_resolution: f64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 500,
            grid_resolution: 0.05,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iterations == 0 {
            return Err(Error::InvalidArgument(
                "search budget needs at least one restart and one iteration".into(),
            ));
        }
        if !(self.grid_resolution > 0.0 && self.grid_resolution <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "grid resolution {} outside (0, 0.5]",
                self.grid_resolution
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// |U| used when the caller does not choose one.
pub fn default_card_u(alphabet_a: usize) -> usize {
    alphabet_a + 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Canonical maximizer.
    pub u: AuxChannelU,
    /// Objective at `u` (not clipped at zero).
    pub value: f64,
    pub evaluations: u64,
}

struct Candidate {
    rows: Vec<Vec<f64>>,
    value: f64,
    card: usize,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.value > other.value + TIE_TOL
            || ((self.value - other.value).abs() <= TIE_TOL && self.card < other.card)
    }
}

/// Multi-restart hill climbing over p(u|a) with |U| = `card_u`.
///
/// Constant U is evaluated first, then the optional warm start (climbed),
/// then `budget.restarts` random starts. Restart `r` draws from its own
/// stream keyed by `(budget.seed, stream_tag, r)`, so results do not depend
/// on evaluation order. Ties go to the smaller effective cardinality.
pub fn maximize_u<O: UObjective>(
    objective: &O,
    prior: &[f64],
    card_u: usize,
    budget: &SearchBudget,
    warm: Option<&AuxChannelU>,
    stream_tag: u64,
) -> Result<SearchOutcome> {
    budget.validate()?;
    if card_u == 0 {
        return Err(Error::InvalidArgument("|U| must be at least 1".into()));
    }
    let na = objective.alphabet_a();
    if prior.len() != na {
        return Err(Error::DimensionMismatch {
            expected: na,
            actual: prior.len(),
        });
    }
    let mut evaluations = 0u64;
    let mut eval = |rows: &[Vec<f64>]| {
        evaluations += 1;
        objective.value(rows)
    };

    let constant: Vec<Vec<f64>> = (0..na)
        .map(|_| {
            let mut r = vec![0.0; card_u];
            r[0] = 1.0;
            r
        })
        .collect();
    let value = eval(&constant);
    let mut best = Candidate {
        rows: constant,
        value,
        card: 1,
    };

    let mut starts: Vec<(Vec<Vec<f64>>, u64)> = Vec::new();
    if let Some(w) = warm {
        if w.rows().len() != na || w.cardinality() > card_u {
            return Err(Error::DimensionMismatch {
                expected: card_u,
                actual: w.cardinality(),
            });
        }
        starts.push((w.padded(card_u).rows().to_vec(), u64::MAX));
    }
    for r in 0..budget.restarts as u64 {
        let mut rng = rng_for(budget.seed, stream_tag, r);
        let rows = (0..na)
            .map(|_| {
                let raw: Vec<f64> = (0..card_u)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / s).collect()
            })
            .collect();
        starts.push((rows, r));
    }

    for (mut rows, r) in starts {
        let mut rng = rng_for(budget.seed, stream_tag ^ 0x5EED, r);
        let value = climb(&mut eval, &mut rows, budget.iterations, &mut rng);
        let card = canonical_rows(&rows, prior).first().map_or(0, Vec::len);
        let cand = Candidate { rows, value, card };
        if cand.beats(&best) {
            best = cand;
        }
    }

    let u = AuxChannelU::from_rows(best.rows)?.canonical(prior);
    Ok(SearchOutcome {
        u,
        value: best.value,
        evaluations,
    })
}

/// Coordinate-wise mass transfers within a row, accepting improvements only.
fn climb<F, R>(eval: &mut F, rows: &mut [Vec<f64>], iterations: usize, rng: &mut R) -> f64
where
    F: FnMut(&[Vec<f64>]) -> f64,
    R: Rng,
{
    let na = rows.len();
    let nu = rows[0].len();
    let mut current = eval(rows);
    if nu < 2 {
        return current;
    }
    let mut step = 0.5;
    let mut misses = 0usize;
    let patience = 2 * na * nu;
    for _ in 0..iterations {
        let a = rng.gen_range(0..na);
        let from = rng.gen_range(0..nu);
        let mut to = rng.gen_range(0..nu - 1);
        if to >= from {
            to += 1;
        }
        let avail = rows[a][from];
        if avail <= 0.0 {
            continue;
        }
        let amount = if rng.gen_bool(0.2) {
            avail
        } else {
            (step * rng.gen::<f64>()).min(avail)
        };
        rows[a][from] -= amount;
        rows[a][to] += amount;
        let v = eval(rows);
        if v > current {
            current = v;
            misses = 0;
        } else {
            rows[a][from] += amount;
            rows[a][to] -= amount;
            misses += 1;
            if misses >= patience {
                step = (step * 0.5).max(1e-6);
                misses = 0;
            }
        }
    }
    current
}

/// Result of maximizing the uncoded-side-information bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct UncodedOptimum {
    pub u: AuxChannelU,
    /// max [I(A;B|U) - I(A;E|U)]^+ over visited U.
    pub delta: f64,
    /// The bracket before clipping at zero.
    pub bracket: f64,
    pub evaluations: u64,
    /// Local search only: `delta` is a lower bound on the true maximum.
    pub lower_bound_only: bool,
}

fn bracket_abe(j_abe: &JointDistribution) -> Result<Bracket> {
    let e = j_abe.has(E).then_some(E);
    Bracket::from_joint(j_abe, A, B, e)
}

/// Maximizes [I(A;B|U) - I(A;E|U)]^+ over p(u|a) with |U| = `card_u`.
pub fn maximize_delta_uncoded(
    j_abe: &JointDistribution,
    card_u: usize,
    budget: &SearchBudget,
) -> Result<UncodedOptimum> {
    maximize_delta_uncoded_from(j_abe, card_u, budget, None)
}

pub fn maximize_delta_uncoded_from(
    j_abe: &JointDistribution,
    card_u: usize,
    budget: &SearchBudget,
    warm: Option<&AuxChannelU>,
) -> Result<UncodedOptimum> {
    let objective = bracket_abe(j_abe)?;
    let prior = j_abe.marginal(&[A])?.mass().to_vec();
    let out = maximize_u(&objective, &prior, card_u, budget, warm, stream::U_RESTART)?;
    Ok(UncodedOptimum {
        u: out.u,
        delta: positive_part(out.value),
        bracket: out.value,
        evaluations: out.evaluations,
        lower_bound_only: true,
    })
}

/// Runs |U| = 1, 2, ..., `max_card`, warm-starting each cardinality from the
/// previous optimum, so the returned deltas are nondecreasing.
pub fn maximize_delta_nested(
    j_abe: &JointDistribution,
    max_card: usize,
    budget: &SearchBudget,
) -> Result<Vec<UncodedOptimum>> {
    let mut out: Vec<UncodedOptimum> = Vec::with_capacity(max_card);
    for k in 1..=max_card {
        let warm = out.last().map(|o| o.u.clone());
        out.push(maximize_delta_uncoded_from(j_abe, k, budget, warm.as_ref())?);
    }
    Ok(out)
}
