use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{ChainSpec, Resolved};
use super::output::{Cell, CommandOutput, Table};
use super::CliError;
use crate::auxsearch::{maximize_delta_uncoded, trace_inner_frontier, AuxChannelU, VMap};
use crate::binsim::{plan_scheme, run_experiment};
use crate::error::Error;
use crate::probcore::{degradedness_test, replay_residual, Channel, JointDistribution};
use crate::regions::{
    contains, convexify, corollary1_region, corollary2_region, corollary3_region, corollary4_best,
    corollary4_region, corollary5_best, corollary5_region, count_indexed, eve_si_regions, lemma1_region,
    outer_from, theorem1_inner_region, theorem1_outer_from, EvePlacement, FrontierPoint, FrontierSamples,
    PointShape, Provenance, RatePoint, RegionDescriptor, RegionKind, Sense, TheoremEvaluator, UInput,
    MARKOV_TOL,
};
use crate::vars::{bk, ek, A, B, C, E};

/// Slack allowed between inner and outer values on the same grid point.
pub const SANDWICH_TOL: f64 = 1e-9;

fn role_error(msg: impl Into<String>) -> CliError {
    CliError::Role(msg.into())
}

fn require(j: &JointDistribution, roles: &[&str], what: &str) -> Result<(), CliError> {
    for r in roles {
        if !j.has(r) {
            return Err(role_error(format!("{what} needs a variable with role {r}")));
        }
    }
    Ok(())
}

/// Marginal on `keep`, skipping names that are absent.
fn project(j: &JointDistribution, keep: &[&str]) -> Result<JointDistribution, CliError> {
    let present: Vec<&str> = keep.iter().copied().filter(|n| j.has(n)).collect();
    Ok(j.marginal(&present)?)
}

/// Adds a constant E when the source declares none.
fn with_e(j: JointDistribution) -> Result<JointDistribution, CliError> {
    if j.has(E) {
        return Ok(j);
    }
    Ok(j.attach_channel(&Channel::constant(A, E, j.axis(A)?.size())?, A)?)
}

fn kebab(value: &impl Serialize) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn user_u(r: &Resolved, na: usize) -> Result<Option<AuxChannelU>, CliError> {
    let Some(rows) = &r.options().u else { return Ok(None) };
    if rows.len() != na {
        return Err(CliError::Validation(format!(
            "options.u has {} rows, A has {na} symbols",
            rows.len()
        )));
    }
    Ok(Some(AuxChannelU::from_rows(rows.clone())?))
}

fn user_v(r: &Resolved) -> Result<Option<VMap>, CliError> {
    r.options().v.as_deref().map(VMap::from_partition).transpose().map_err(Into::into)
}

fn short_digest(value: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(value).expect("digest input serializes");
    hex::encode(&Sha256::digest(bytes)[..8])
}

pub fn info(r: &Resolved) -> Result<CommandOutput, CliError> {
    let j = &r.source.joint;
    let mut rows: Vec<(String, f64)> = Vec::new();
    let mut h = |label: &str, t: &[&str], g: &[&str]| -> crate::Result<()> {
        rows.push((label.to_string(), j.h(t, g)?));
        Ok(())
    };
    h("H(A)", &[A], &[])?;
    if j.has(C) {
        h("H(C)", &[C], &[])?;
        h("H(A,C)", &[A, C], &[])?;
        h("H(A|C)", &[A], &[C])?;
        h("H(C|A)", &[C], &[A])?;
    }
    if j.has(E) {
        h("H(E)", &[E], &[])?;
        h("H(A|E)", &[A], &[E])?;
    } else {
        h("H(A|E)", &[A], &[])?;
    }
    if j.has(B) {
        h("H(B)", &[B], &[])?;
        h("H(A|B)", &[A], &[B])?;
        if j.has(E) {
            h("H(A|B,E)", &[A], &[B, E])?;
        }
    }
    let nb = count_indexed(j, bk);
    let ne = count_indexed(j, ek);
    for k in 1..=nb {
        let b = bk(k);
        rows.push((format!("H(A|{b})"), j.h(&[A], &[&b])?));
    }
    for k in 1..=ne {
        let e = ek(k);
        rows.push((format!("H(A|{e})"), j.h(&[A], &[&e])?));
    }
    let mut i = |label: String, x: &str, y: &str, g: &[&str]| -> crate::Result<()> {
        rows.push((label, j.mi(&[x], &[y], g)?));
        Ok(())
    };
    if j.has(C) {
        i("I(A;C)".into(), A, C, &[])?;
    }
    if j.has(E) {
        i("I(A;E)".into(), A, E, &[])?;
        if j.has(C) {
            i("I(C;E)".into(), C, E, &[])?;
        }
    }
    if j.has(B) {
        i("I(A;B)".into(), A, B, &[])?;
        if j.has(E) {
            i("I(A;B|E)".into(), A, B, &[E])?;
            i("I(A;E|B)".into(), A, E, &[B])?;
        }
    }
    for k in 1..=nb {
        let b = bk(k);
        i(format!("I(A;{b})"), A, &b, &[])?;
        if j.has(E) {
            i(format!("I(A;E|{b})"), A, E, &[&b])?;
        }
    }
    for k in 1..=ne {
        let e = ek(k);
        i(format!("I(A;{e})"), A, &e, &[])?;
    }
    let mut out = CommandOutput::default();
    out.table(Table::measures("measures", rows.iter().map(|(k, v)| (k.as_str(), *v))));
    Ok(out)
}

fn descriptor_tables(out: &mut CommandOutput, r: &Resolved, rd: RegionDescriptor) -> Result<(), CliError> {
    let rd = rd.with_semantics(r.options().semantics.unwrap_or_default());
    out.table(Table::measures("constants", rd.constants.iter().map(|(k, v)| (k.as_str(), *v))));
    let mut ineq = Table::new("inequalities", &["label", "sense", "bound", "delta_lower"]);
    for q in &rd.inequalities {
        let sense = match q.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
        };
        ineq.push(vec![q.label.as_str().into(), sense.into(), q.bound.into(), q.delta_lower.into()]);
    }
    out.table(ineq);
    if let Some(p) = &r.options().point {
        let point = rate_point(rd.shape, p)?;
        let m = contains(&rd, &point)?;
        let mut t = Table::new("membership", &["point", "member", "violated"]);
        let coords: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
        t.push(vec![coords.join(" ").into(), m.member.into(), m.violated.join("; ").into()]);
        out.table(t);
        out.detail("membership", &m);
    }
    out.detail("region", &rd);
    Ok(())
}

fn rate_point(shape: PointShape, p: &[f64]) -> Result<RatePoint, CliError> {
    let expected = match shape {
        PointShape::Triple => 3,
        PointShape::Pair => 2,
        PointShape::MultiDelta(k) => k + 1,
    };
    if p.len() != expected {
        return Err(CliError::Validation(format!(
            "options.point has {} coordinates, this region expects {expected}",
            p.len()
        )));
    }
    Ok(match shape {
        PointShape::Triple => RatePoint::triple(p[0], p[1], p[2]),
        PointShape::Pair => RatePoint::pair(p[0], p[1]),
        PointShape::MultiDelta(_) => RatePoint::MultiDelta {
            ra: p[0],
            deltas: p[1..].to_vec(),
        },
    })
}

fn frontier_table(name: &str, samples: &FrontierSamples) -> Table {
    let mut t = Table::new(name, &["ra", "rc", "delta", "provenance"]);
    for p in &samples.points {
        t.push(vec![p.ra.into(), p.rc.into(), p.delta.into(), p.provenance.describe().into()]);
    }
    t
}

fn candidates_table(ev: &TheoremEvaluator) -> Table {
    let mut t = Table::new("candidates", &["v", "i_cv", "h_a_given_v", "bracket", "u_digest"]);
    for c in &ev.candidates {
        let v: Vec<String> = c.v.partition().iter().map(ToString::to_string).collect();
        t.push(vec![
            v.join("").into(),
            c.i_cv.into(),
            c.h_a_given_v.into(),
            c.bracket.into(),
            short_digest(&c.u.rows()).into(),
        ]);
    }
    t
}

fn theorem_source(r: &Resolved, what: &str) -> Result<JointDistribution, CliError> {
    let j = &r.source.joint;
    require(j, &[A, C], what)?;
    project(j, &[A, C, E])
}

fn grids(r: &Resolved) -> (Vec<f64>, Vec<f64>) {
    let o = r.options();
    (o.ra_grid.clone().unwrap_or_default(), o.rc_grid.clone().unwrap_or_default())
}

fn theorem1_inner(r: &Resolved, out: &mut CommandOutput) -> Result<(), CliError> {
    let j = theorem_source(r, "theorem1-inner")?;
    let (ra, rc) = grids(r);
    let grid = trace_inner_frontier(&j, r.card_u(), &ra, &rc, &r.budget())?;
    let mut evals = Table::new("evaluations", &["ra", "rc", "status", "delta", "delta_lower"]);
    for e in &grid.evaluations {
        evals.push(vec![e.ra.into(), e.rc.into(), kebab(&e.status).into(), e.delta.into(), e.delta_lower.into()]);
    }
    out.table(evals);
    out.table(frontier_table("frontier-raw", &grid.raw));
    out.table(frontier_table("frontier-convexified", &grid.convexified));
    let best = grid
        .raw
        .points
        .iter()
        .filter(|p| p.delta.is_some())
        .max_by(|a, b| a.delta.unwrap_or(0.0).total_cmp(&b.delta.unwrap_or(0.0)));
    let na = j.axis(A)?.size();
    let (mut u, mut v) = (AuxChannelU::constant(na), VMap::identity(j.axis(C)?.size()));
    if let Some(FrontierPoint {
        provenance: Provenance::Aux { u: ur, v: vp },
        ..
    }) = best
    {
        u = AuxChannelU::from_rows(ur.clone())?;
        v = VMap::from_partition(vp)?;
    }
    if let Some(uu) = user_u(r, na)? {
        u = uu;
    }
    if let Some(vv) = user_v(r)? {
        v = vv;
    }
    descriptor_tables(out, r, theorem1_inner_region(&j, &u, &v)?)?;
    out.detail("frontier", &grid);
    Ok(())
}

fn theorem1_outer(r: &Resolved, out: &mut CommandOutput) -> Result<(), CliError> {
    let j = theorem_source(r, "theorem1-outer-overapprox")?;
    let (ra_grid, rc_grid) = grids(r);
    let ev = TheoremEvaluator::outer(&j, r.card_u(), &r.budget())?;
    let mut bounds = Table::new("outer-bounds", &["ra", "rc", "delta_upper", "bracket_max", "rate_cap"]);
    let mut points = Vec::new();
    for &ra in &ra_grid {
        for &rc in &rc_grid {
            let ob = outer_from(&ev, ra, rc);
            bounds.push(vec![ra.into(), rc.into(), ob.delta_upper.into(), ob.bracket_max.into(), ob.rate_cap.into()]);
            let provenance = match ev.evaluate(ra, rc).witness {
                Some(i) if ob.delta_upper.is_some() => Provenance::Aux {
                    u: ev.candidates[i].u.rows().to_vec(),
                    v: ev.candidates[i].v.partition().to_vec(),
                },
                _ => Provenance::Infeasible,
            };
            points.push(FrontierPoint {
                ra,
                rc,
                delta: ob.delta_upper,
                provenance,
            });
        }
    }
    let raw = FrontierSamples::new(points);
    let convexified = convexify(&raw);
    out.table(bounds);
    out.table(candidates_table(&ev));
    out.table(frontier_table("frontier-raw", &raw));
    out.table(frontier_table("frontier-convexified", &convexified));
    descriptor_tables(out, r, theorem1_outer_from(&ev))?;
    out.detail("frontier", serde_json::json!({ "raw": raw, "convexified": convexified }));
    Ok(())
}

pub fn region(r: &Resolved, kind: RegionKind) -> Result<CommandOutput, CliError> {
    let mut out = CommandOutput::default();
    let j = &r.source.joint;
    let na = j.axis(A)?.size();
    let card_u = r.card_u();
    let budget = r.budget();
    let rd = match kind {
        RegionKind::Theorem1Inner => {
            theorem1_inner(r, &mut out)?;
            return Ok(out);
        }
        RegionKind::Theorem1OuterOverapprox => {
            theorem1_outer(r, &mut out)?;
            return Ok(out);
        }
        RegionKind::Corollary1 => {
            require(j, &[A, C], kind.name())?;
            corollary1_region(&project(j, &[A, C])?)?
        }
        RegionKind::Corollary2 => {
            require(j, &[A, B], kind.name())?;
            let jabe = with_e(project(j, &[A, B, E])?)?;
            let u = match user_u(r, na)? {
                Some(u) => u,
                None => maximize_delta_uncoded(&jabe, card_u, &budget)?.u,
            };
            corollary2_region(&jabe, UInput::Channel(&u))?
        }
        RegionKind::Lemma1 => {
            let h_b = match (r.options().h_b, j.has(B)) {
                (Some(h), _) => h,
                (None, true) => {
                    let rest: Vec<&str> = [A, E].into_iter().filter(|n| j.has(n)).collect();
                    let dep = j.mi(&[B], &rest, &[])?;
                    if dep > MARKOV_TOL {
                        return Err(Error::IndependenceFailed(format!(
                            "I(B;{}) = {dep:e} bits, B must be independent of the source",
                            rest.join(",")
                        ))
                        .into());
                    }
                    j.h(&[B], &[])?
                }
                (None, false) => return Err(role_error("lemma1 needs options.h_b or a variable with role B")),
            };
            lemma1_region(&project(j, &[A, E])?, h_b)?
        }
        RegionKind::EveSiAtBob | RegionKind::EveSiAtAlice => {
            require(j, &[A, B], kind.name())?;
            let placement = if kind == RegionKind::EveSiAtBob {
                EvePlacement::AtBob
            } else {
                EvePlacement::AtAlice
            };
            eve_si_regions(&with_e(project(j, &[A, B, E])?)?, placement)?
        }
        RegionKind::Corollary3 | RegionKind::Corollary4 => {
            let k = count_indexed(j, bk);
            if k == 0 {
                return Err(role_error(format!("{} needs receivers with roles B1..BK", kind.name())));
            }
            let names: Vec<String> = (1..=k).map(bk).collect();
            let mut keep: Vec<&str> = vec![A];
            keep.extend(names.iter().map(String::as_str));
            keep.push(E);
            let js = with_e(project(j, &keep)?)?;
            if kind == RegionKind::Corollary3 {
                corollary3_region(&js)?
            } else {
                match user_u(r, na)? {
                    Some(u) => corollary4_region(&js, UInput::Channel(&u))?,
                    None => corollary4_best(&js, card_u, &budget)?,
                }
            }
        }
        RegionKind::Corollary5 => {
            require(j, &[A, B], kind.name())?;
            let k = count_indexed(j, ek);
            if k == 0 {
                return Err(role_error("corollary5 needs eavesdroppers with roles E1..EK"));
            }
            let names: Vec<String> = (1..=k).map(ek).collect();
            let mut keep: Vec<&str> = vec![A, B];
            keep.extend(names.iter().map(String::as_str));
            let js = project(j, &keep)?;
            match user_u(r, na)? {
                Some(u) => corollary5_region(&js, UInput::Channel(&u))?,
                None => corollary5_best(&js, card_u, r.options().weights.as_deref(), &budget)?,
            }
        }
    };
    descriptor_tables(&mut out, r, rd)?;
    Ok(out)
}

fn name_n(n: usize, e: Error) -> Error {
    match e {
        Error::TooLarge(msg) => Error::TooLarge(format!("block length N={n}: {msg}")),
        other => other,
    }
}

pub fn simulate(r: &Resolved) -> Result<CommandOutput, CliError> {
    let j = &r.source.joint;
    require(j, &[A, C], "simulate")?;
    let source = project(j, &[A, C, E])?;
    let o = r.options();
    let u = user_u(r, source.axis(A)?.size())?.unwrap_or_else(|| AuxChannelU::constant(source.axis(A).map_or(1, |a| a.size())));
    let v = user_v(r)?.unwrap_or_else(|| VMap::identity(source.axis(C).map_or(1, |c| c.size())));
    let margins = o.margins.unwrap_or_default();
    let delta = o.delta.unwrap_or(crate::binsim::DEFAULT_DELTA);
    let trials = o.trials.unwrap_or(1000);
    let mut t = Table::new(
        "simulation",
        &[
            "n",
            "p_e",
            "wilson_lo",
            "wilson_hi",
            "equivocation",
            "mode",
            "floor",
            "target",
            "alice_rate",
            "aux_bins",
            "source_bins",
            "v_codebook",
        ],
    );
    let mut reports = Vec::new();
    for &n in o.block_lengths.as_deref().unwrap_or(&[8, 12]) {
        let cfg = plan_scheme(&source, &u, &v, n, margins, delta, r.seed()).map_err(|e| name_n(n, e))?;
        let rep = run_experiment(&cfg, trials).map_err(|e| name_n(n, e))?;
        t.push(vec![
            n.into(),
            rep.error.p_e.into(),
            rep.error.wilson_95.0.into(),
            rep.error.wilson_95.1.into(),
            rep.equivocation.per_symbol.into(),
            kebab(&rep.equivocation.mode).into(),
            rep.theory.floor.into(),
            rep.theory.target_delta.into(),
            rep.theory.alice_rate.into(),
            rep.counts.aux_bins.into(),
            rep.counts.source_bins.into(),
            rep.counts.v_codebook.into(),
        ]);
        reports.push(rep);
    }
    let mut out = CommandOutput::default();
    out.table(t);
    out.detail("experiments", &reports);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Degraded,
    Markov,
    Sandwich,
}

pub fn check(r: &Resolved, which: CheckKind) -> Result<CommandOutput, CliError> {
    match which {
        CheckKind::Degraded => check_degraded(r),
        CheckKind::Markov => check_markov(r),
        CheckKind::Sandwich => check_sandwich(r),
    }
}

fn check_degraded(r: &Resolved) -> Result<CommandOutput, CliError> {
    let j = &r.source.joint;
    require(j, &[A, B, E], "check degraded")?;
    let ch_b = j.conditional(B, &[A])?.into_channel()?;
    let ch_e = j.conditional(E, &[A])?.into_channel()?;
    let verdict = degradedness_test(&ch_b, &ch_e)?;
    let mut t = Table::new("degraded", &["feasible", "residual", "replay_residual", "witness_digest"]);
    let (replay, digest) = match &verdict.witness {
        Some(w) => (Cell::from(replay_residual(&ch_b, w, &ch_e)), Cell::from(short_digest(&w.matrix()))),
        None => (Cell::Missing, Cell::Missing),
    };
    t.push(vec![verdict.feasible.into(), verdict.residual.into(), replay, digest]);
    let mut out = CommandOutput::default();
    out.table(t);
    out.detail("witness", verdict.witness.as_ref().map(|w| w.matrix().to_vec()));
    Ok(out)
}

fn chain(x: &[&str], y: &[&str], z: &[&str]) -> ChainSpec {
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
    ChainSpec {
        x: own(x),
        y: own(y),
        z: own(z),
    }
}

/// Chains implied by the declared roles.
fn default_chains(j: &JointDistribution) -> Vec<ChainSpec> {
    let mut out = Vec::new();
    if j.has(B) && j.has(E) {
        out.push(chain(&[A], &[B], &[E]));
    }
    let k = count_indexed(j, bk);
    for i in 1..=k {
        if j.has(E) {
            out.push(chain(&[A], &[&bk(i)], &[E]));
        }
    }
    for i in 1..k {
        out.push(chain(&[A], &[&bk(i)], &[&bk(i + 1)]));
    }
    out
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn check_markov(r: &Resolved) -> Result<CommandOutput, CliError> {
    let j = &r.source.joint;
    let chains = match &r.options().chains {
        Some(c) => c.clone(),
        None => default_chains(j),
    };
    if chains.is_empty() {
        return Err(CliError::Validation(
            "no Markov chains implied by the roles; list them in options.chains".into(),
        ));
    }
    let mut t = Table::new("markov", &["chain", "residual", "holds"]);
    for c in &chains {
        let res = j.markov_residual(&refs(&c.x), &refs(&c.y), &refs(&c.z))?;
        t.push(vec![c.label().into(), res.into(), (res <= MARKOV_TOL).into()]);
    }
    let mut out = CommandOutput::default();
    out.table(t);
    Ok(out)
}

fn samples(ev: &TheoremEvaluator, ra_grid: &[f64], rc_grid: &[f64], outer: bool) -> FrontierSamples {
    let mut points = Vec::with_capacity(ra_grid.len() * rc_grid.len());
    for &ra in ra_grid {
        for &rc in rc_grid {
            let pe = ev.evaluate(ra, rc);
            let delta = if outer { outer_from(ev, ra, rc).delta_upper } else { pe.delta };
            let provenance = match (delta, pe.witness) {
                (Some(_), Some(i)) => Provenance::Aux {
                    u: ev.candidates[i].u.rows().to_vec(),
                    v: ev.candidates[i].v.partition().to_vec(),
                },
                _ => Provenance::Infeasible,
            };
            points.push(FrontierPoint {
                ra,
                rc,
                delta,
                provenance,
            });
        }
    }
    FrontierSamples::new(points)
}

/// Largest inner - outer over points where the inner value exists; an
/// inner value with no outer value counts as an infinite gap.
fn max_gap(inner: &FrontierSamples, outer: &FrontierSamples) -> (usize, f64, Vec<Option<f64>>) {
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    let gaps = inner
        .points
        .iter()
        .zip(&outer.points)
        .map(|(i, o)| {
            let g = i.delta.map(|iv| iv - o.delta.unwrap_or(f64::NEG_INFINITY));
            if let Some(g) = g {
                checked += 1;
                worst = worst.max(g);
            }
            g
        })
        .collect();
    (checked, worst, gaps)
}

fn gap_cell(g: Option<f64>) -> Cell {
    match g {
        None => Cell::Missing,
        Some(g) if g.is_finite() => g.into(),
        Some(_) => "inf".into(),
    }
}

fn check_sandwich(r: &Resolved) -> Result<CommandOutput, CliError> {
    let j = theorem_source(r, "check sandwich")?;
    let (ra_grid, rc_grid) = grids(r);
    let budget = r.budget();
    let inner = TheoremEvaluator::inner(&j, r.card_u(), &budget)?;
    let outer = TheoremEvaluator::outer(&j, r.card_u(), &budget)?;
    let inner_raw = samples(&inner, &ra_grid, &rc_grid, false);
    let outer_raw = samples(&outer, &ra_grid, &rc_grid, true);
    let inner_hull = convexify(&inner_raw);
    let outer_hull = convexify(&outer_raw);
    let (checked, raw_gap, gaps) = max_gap(&inner_raw, &outer_raw);
    let (_, hull_gap, hull_gaps) = max_gap(&inner_hull, &outer_hull);

    let mut t = Table::new(
        "sandwich",
        &["ra", "rc", "inner_delta", "outer_upper", "gap", "inner_hull", "outer_hull", "hull_gap"],
    );
    for i in 0..inner_raw.points.len() {
        let p = &inner_raw.points[i];
        t.push(vec![
            p.ra.into(),
            p.rc.into(),
            p.delta.into(),
            outer_raw.points[i].delta.into(),
            gap_cell(gaps[i]),
            inner_hull.points[i].delta.into(),
            outer_hull.points[i].delta.into(),
            gap_cell(hull_gaps[i]),
        ]);
    }
    let src = &inner.source;
    let mut inact = Table::new("rate-cap-inactivity", &["v", "bracket", "i_ac", "i_cv_minus_h_c_given_a", "holds"]);
    let mut inactive_ok = true;
    for c in &inner.candidates {
        let cap = c.i_cv - src.h_c_given_a;
        let holds = c.bracket <= src.i_ac + SANDWICH_TOL && c.bracket <= cap + SANDWICH_TOL;
        inactive_ok &= holds;
        let v: Vec<String> = c.v.partition().iter().map(ToString::to_string).collect();
        inact.push(vec![v.join("").into(), c.bracket.into(), src.i_ac.into(), cap.into(), holds.into()]);
    }
    let worst = raw_gap.max(hull_gap);
    let sandwich_ok = checked == 0 || worst <= SANDWICH_TOL;
    let mut summary = Table::new(
        "summary",
        &["points_checked", "max_gap", "max_hull_gap", "sandwich_holds", "rate_cap_inactive"],
    );
    let opt_gap = |g: f64| if checked == 0 { Cell::Missing } else { gap_cell(Some(g)) };
    summary.push(vec![
        checked.into(),
        opt_gap(raw_gap),
        opt_gap(hull_gap),
        sandwich_ok.into(),
        inactive_ok.into(),
    ]);
    let mut out = CommandOutput::default();
    out.table(summary);
    out.table(t);
    out.table(inact);
    if !sandwich_ok {
        out.violation = Some(format!("inner value exceeds outer bound by {worst:e} bits"));
    } else if !inactive_ok {
        out.violation = Some("an inner candidate violates the rate-cap inactivity inequality".into());
    }
    Ok(out)
}
