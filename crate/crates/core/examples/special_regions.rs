//! Closed-form regions: no side information, uncoded side information at
//! Bob, an independent key, and Eve's side information shared with Bob or
//! Alice.

use swsec::auxsearch::{maximize_delta_uncoded, SearchBudget};
use swsec::probcore::{Channel, JointDistribution};
use swsec::regions::{
    contains, corollary1_region, corollary2_region, eve_si_regions, lemma1_region, EvePlacement, RatePoint,
    RegionDescriptor, Semantics, UInput,
};

fn show(rd: &RegionDescriptor) {
    println!("{}:", rd.kind.name());
    for (k, v) in &rd.constants {
        println!("  {k} = {v:.6}");
    }
}

fn main() -> swsec::Result<()> {
    let a = JointDistribution::uniform("A", 2)?;
    let copy = a.attach_channel(&Channel::identity("A", "C", 2)?, "A")?;
    let c1 = corollary1_region(&copy)?;
    show(&c1);
    for delta in [0.5, 0.4] {
        let p = RatePoint::triple(0.5, 1.0, delta);
        let as_written = contains(&c1, &p)?;
        let closed = contains(&c1.clone().with_semantics(Semantics::DeltaDownwardClosed), &p)?;
        println!(
            "  (0.5, 1.0, {delta}): member={} downward-closed member={} violated={:?}",
            as_written.member, closed.member, as_written.violated
        );
    }

    let abe = a
        .attach_channel(&Channel::bsc("A", "B", 0.1)?, "A")?
        .attach_channel(&Channel::bsc("B", "E", 0.1)?, "B")?;
    let u = maximize_delta_uncoded(&abe, 4, &SearchBudget::default())?.u;
    show(&corollary2_region(&abe, UInput::Channel(&u))?);
    show(&eve_si_regions(&abe, EvePlacement::AtBob)?);
    show(&eve_si_regions(&abe, EvePlacement::AtAlice)?);

    let ae = a.attach_channel(&Channel::constant("A", "E", 2)?, "A")?;
    show(&lemma1_region(&ae, 1.0)?);
    Ok(())
}
