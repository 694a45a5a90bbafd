//! Entropies and mutual informations of a doubly symmetric binary source
//! with Eve observing A through a BSC.

use swsec::probcore::{Channel, InfoQuery, JointDistribution};

fn main() -> swsec::Result<()> {
    let ac = JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.45, 0.05, 0.05, 0.45])?;
    let ace = ac.attach_channel(&Channel::bsc("A", "E", 0.25)?, "A")?;

    let queries = [
        InfoQuery::entropy(&["A"], &[]),
        InfoQuery::entropy(&["A"], &["C"]),
        InfoQuery::entropy(&["C"], &["A"]),
        InfoQuery::entropy(&["A", "C"], &[]),
        InfoQuery::entropy(&["A"], &["E"]),
        InfoQuery::mutual(&["A"], &["C"], &[]),
        InfoQuery::mutual(&["A"], &["E"], &[]),
        InfoQuery::mutual(&["C"], &["E"], &["A"]),
    ];
    println!("name,bits");
    for q in &queries {
        println!("{},{:.6}", q.label(), ace.info_measure(q)?);
    }
    println!("markov residual C - A - E: {:e}", ace.markov_residual(&["C"], &["A"], &["E"])?);
    Ok(())
}
