//! Several receivers (a degraded chain) and several eavesdroppers.

use swsec::auxsearch::SearchBudget;
use swsec::probcore::{Channel, JointDistribution};
use swsec::regions::{corollary3_region, corollary4_best, corollary5_best};

fn main() -> swsec::Result<()> {
    let budget = SearchBudget::default();
    let a = JointDistribution::uniform("A", 2)?;
    let chain = a
        .attach_channel(&Channel::bsc("A", "B1", 0.1)?, "A")?
        .attach_channel(&Channel::bsc("B1", "B2", 0.125)?, "B1")?
        .attach_channel(&Channel::bsc("B2", "E", 0.1)?, "B2")?;
    for rd in [corollary3_region(&chain)?, corollary4_best(&chain, 4, &budget)?] {
        println!("{}:", rd.kind.name());
        for (k, v) in &rd.constants {
            println!("  {k} = {v:.6}");
        }
    }

    let eves = a
        .attach_channel(&Channel::bsc("A", "B", 0.05)?, "A")?
        .attach_channel(&Channel::bsc("A", "E1", 0.2)?, "A")?
        .attach_channel(&Channel::bsc("A", "E2", 0.3)?, "A")?;
    let rd = corollary5_best(&eves, 4, None, &budget)?;
    println!("{}:", rd.kind.name());
    for (k, v) in &rd.constants {
        println!("  {k} = {v:.6}");
    }

    let broken = a
        .attach_channel(&Channel::bsc("A", "B1", 0.2)?, "A")?
        .attach_channel(&Channel::identity("A", "E", 2)?, "A")?;
    match corollary3_region(&broken) {
        Err(e) => println!("Eve holding A: {e}"),
        Ok(_) => println!("Eve holding A: unexpectedly accepted"),
    }
    Ok(())
}
