//! Block error rate of the double-binning scheme on a doubly symmetric
//! binary source, at several block lengths, plus an undercoded control.

use swsec::auxsearch::{AuxChannelU, VMap};
use swsec::binsim::{generate_codebooks, estimate_error, plan_scheme, run_experiment, Margins, DEFAULT_DELTA};
use swsec::probcore::JointDistribution;

fn main() -> swsec::Result<()> {
    let source = JointDistribution::from_sizes(&[("A", 2), ("C", 2)], vec![0.45, 0.05, 0.05, 0.45])?;
    let u = AuxChannelU::constant(2);
    let v = VMap::identity(2);
    let trials = 2000;

    println!("N,seed,p_e,wilson_lo,wilson_hi,encoder,step1,step2,step3,wrong");
    for n in [8, 12, 16] {
        for seed in 0..5u64 {
            let cfg = plan_scheme(&source, &u, &v, n, Margins::default(), DEFAULT_DELTA, seed)?;
            let cb = generate_codebooks(&cfg)?;
            let e = estimate_error(&cfg, &cb, trials)?;
            let b = e.breakdown;
            println!(
                "{n},{seed},{:.4},{:.4},{:.4},{},{},{},{},{}",
                e.p_e, e.wilson_95.0, e.wilson_95.1, b.encoder, b.aux_codeword, b.source_sequence, b.reconstruction,
                b.wrong_output
            );
        }
    }

    // source-bin exponent 0.1 bit below H(A|V,U)
    let cfg = plan_scheme(&source, &u, &v, 12, Margins::default(), DEFAULT_DELTA, 0)?;
    let bins = (12.0 * (cfg.terms.h_a_given_vu - 0.1)).exp2().ceil() as u64;
    let under = cfg.with_source_bins(bins)?;
    let cb = generate_codebooks(&under)?;
    println!("undercoded N=12 bins={bins}: p_e = {:.4}", estimate_error(&under, &cb, trials)?.p_e);

    let report = run_experiment(&plan_scheme(&source, &u, &v, 12, Margins::default(), DEFAULT_DELTA, 0)?, 500)?;
    println!(
        "N=12 equivocation {:.6} bits/symbol, floor {:.6}, target {:.6}",
        report.equivocation.per_symbol, report.theory.floor, report.theory.target_delta
    );
    Ok(())
}
