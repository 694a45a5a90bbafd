//! Inner and outer bounds on a rate grid for a copy source (C = A) with
//! Eve observing A through BSC(0.25).

use swsec::auxsearch::{trace_inner_frontier, SearchBudget};
use swsec::probcore::{Channel, JointDistribution};
use swsec::regions::{convexify, outer_from, FrontierPoint, FrontierSamples, Provenance, TheoremEvaluator};

fn main() -> swsec::Result<()> {
    let a = JointDistribution::uniform("A", 2)?;
    let source = a
        .attach_channel(&Channel::identity("A", "C", 2)?, "A")?
        .attach_channel(&Channel::bsc("A", "E", 0.25)?, "A")?;
    let budget = SearchBudget::default();
    let ra = [0.0, 0.25, 0.5, 0.75, 1.0];
    let rc = [0.0, 0.5, 1.0];

    let grid = trace_inner_frontier(&source, 4, &ra, &rc, &budget)?;
    let outer = TheoremEvaluator::outer(&source, 4, &budget)?;
    // per-point outer values miss time sharing across V, so compare hulls
    let outer_points = grid
        .raw
        .points
        .iter()
        .map(|p| FrontierPoint {
            delta: outer_from(&outer, p.ra, p.rc).delta_upper,
            provenance: Provenance::Infeasible,
            ..p.clone()
        })
        .collect();
    let outer_raw = FrontierSamples::new(outer_points);
    let outer_hull = convexify(&outer_raw);
    let show = |d: Option<f64>| d.map_or("-".to_string(), |x| format!("{x:.6}"));
    println!("ra,rc,inner,inner_hull,outer,outer_hull");
    for (i, raw) in grid.raw.points.iter().enumerate() {
        println!(
            "{:.2},{:.2},{},{},{},{}",
            raw.ra,
            raw.rc,
            show(raw.delta),
            show(grid.convexified.points[i].delta),
            show(outer_raw.points[i].delta),
            show(outer_hull.points[i].delta)
        );
    }
    Ok(())
}
