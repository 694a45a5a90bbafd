//! Largest [I(A;B|U) - I(A;E|U)]^+ over auxiliary channels U, for a
//! degraded cascade and for a case where Eve is the stronger receiver.

use swsec::auxsearch::{maximize_delta_nested, maximize_delta_uncoded, oracle_grid_u, SearchBudget};
use swsec::probcore::{binary_entropy, Channel, JointDistribution};

fn main() -> swsec::Result<()> {
    let budget = SearchBudget::default();
    let a = JointDistribution::uniform("A", 2)?;
    let cascade = a
        .attach_channel(&Channel::bsc("A", "B", 0.1)?, "A")?
        .attach_channel(&Channel::bsc("B", "E", 0.1)?, "B")?;
    let best = maximize_delta_uncoded(&cascade, 4, &budget)?;
    let grid = oracle_grid_u(&cascade, 2, 0.05)?;
    println!(
        "cascade: search {:.6} (|U| effective {}), grid {:.6}, closed form {:.6}",
        best.delta,
        best.u.effective_cardinality(&[0.5, 0.5]),
        grid.delta,
        binary_entropy(0.18) - binary_entropy(0.1)
    );

    let stronger_eve = a
        .attach_channel(&Channel::bsc("A", "B", 0.2)?, "A")?
        .attach_channel(&Channel::bsc("A", "E", 0.05)?, "A")?;
    for (k, o) in maximize_delta_nested(&stronger_eve, 3, &budget)?.iter().enumerate() {
        println!("stronger Eve, |U| = {}: delta {:.6} bracket {:.6}", k + 1, o.delta, o.bracket);
    }
    Ok(())
}
