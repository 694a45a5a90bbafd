//! Exact equivocation of a one-time pad and of an encoder that sends A in
//! the clear, against the floor H(A|E) - rate.

use swsec::binsim::{equivocation_of_messages, one_time_pad};
use swsec::probcore::JointDistribution;

fn main() -> swsec::Result<()> {
    let source = JointDistribution::uniform("A", 2)?;
    for n in [1, 2, 4, 8] {
        let r = one_time_pad(&source, n)?;
        println!("pad N={n}: {:.12} bits/symbol at rate {:.3}", r.per_symbol, r.message_rate);
    }
    let n = 6;
    let clear: Vec<u64> = (0..1u64 << n).collect();
    let r = equivocation_of_messages(&source, n, &clear, (1u64 << n) as f64, 0)?;
    println!("cleartext N={n}: {:.6} bits/symbol, floor {:.6}", r.per_symbol, r.floor);
    Ok(())
}
