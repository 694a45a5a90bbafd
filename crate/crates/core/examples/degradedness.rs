//! Stochastic degradedness: a cascade of two BSCs is degraded, while
//! BSC(0.3) against BSC(0.1) is not.

use swsec::probcore::{degradedness_test, replay_residual, Channel};

fn main() -> swsec::Result<()> {
    let b = Channel::bsc("A", "B", 0.1)?;
    let e = b.then(&Channel::bsc("B", "E", 0.1)?)?;
    let v = degradedness_test(&b, &e)?;
    println!("cascade: feasible={} residual={:.3e}", v.feasible, v.residual);
    if let Some(w) = &v.witness {
        println!("  witness p(e|b) = {:?}", w.matrix());
        println!("  replayed residual {:.3e}", replay_residual(&b, w, &e));
    }

    let noisy = Channel::bsc("A", "B", 0.3)?;
    let clean = Channel::bsc("A", "E", 0.1)?;
    let v = degradedness_test(&noisy, &clean)?;
    println!("BSC(0.3) vs BSC(0.1): feasible={} residual={:.6}", v.feasible, v.residual);
    Ok(())
}
