//! Property tests for the probability engine, the auxiliary searches and
//! the region machinery.

use proptest::prelude::*;

use swsec::auxsearch::{
    enumerate_vmaps, maximize_delta_nested, maximize_delta_uncoded, oracle_grid_u, SearchBudget,
};
use swsec::probcore::{degradedness_test, replay_residual, Channel, JointDistribution};
use swsec::regions::{
    contains, convexify, corollary1_region, corollary2_region, eve_si_regions, EvePlacement, FrontierPoint,
    FrontierSamples, Provenance, RatePoint, Sense, Semantics, TheoremEvaluator, UInput,
};

fn normalize(mut m: Vec<f64>) -> Vec<f64> {
    if m.iter().all(|&x| x == 0.0) {
        m[0] = 1.0;
    }
    let s: f64 = m.iter().sum();
    m.iter_mut().for_each(|x| *x /= s);
    m
}

/// Nonnegative weights with some exact zeros.
fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 5 => 0.0..1.0f64], n).prop_map(normalize)
}

fn joint3() -> impl Strategy<Value = JointDistribution> {
    (2usize..=3, 2usize..=3, 2usize..=3).prop_flat_map(|(x, y, z)| {
        weights(x * y * z)
            .prop_map(move |m| JointDistribution::from_sizes(&[("X", x), ("Y", y), ("Z", z)], m).unwrap())
    })
}

fn stochastic_rows(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.01..1.0f64, cols).prop_map(normalize), rows)
}

/// Binary A with B and E drawn through independent channels.
fn binary_abe() -> impl Strategy<Value = JointDistribution> {
    (0.1..0.9f64, stochastic_rows(2, 2), stochastic_rows(2, 2)).prop_map(|(pa, b, e)| {
        JointDistribution::single("A", vec![pa, 1.0 - pa])
            .unwrap()
            .attach_channel(&Channel::from_rows("A", "B", b).unwrap(), "A")
            .unwrap()
            .attach_channel(&Channel::from_rows("A", "E", e).unwrap(), "A")
            .unwrap()
    })
}

fn fast_budget(seed: u64) -> SearchBudget {
    SearchBudget {
        restarts: 8,
        iterations: 200,
        ..SearchBudget::default()
    }
    .with_seed(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn measures_bounded_and_chain_rule(j in joint3()) {
        let hx = j.h(&["X"], &[]).unwrap();
        let hxy = j.h(&["X", "Y"], &[]).unwrap();
        let hy_x = j.h(&["Y"], &["X"]).unwrap();
        let hx_y = j.h(&["X"], &["Y"]).unwrap();
        prop_assert!((hxy - hx - hy_x).abs() <= 1e-10);
        prop_assert!(hx_y >= 0.0 && hx_y <= hx + 1e-12);
        let i = j.mi(&["X"], &["Y"], &["Z"]).unwrap();
        let cap = j.h(&["X"], &["Z"]).unwrap().min(j.h(&["Y"], &["Z"]).unwrap());
        prop_assert!(i >= 0.0 && i <= cap + 1e-12);
    }

    #[test]
    fn attached_channel_is_markov(j in joint3(), rows in stochastic_rows(3, 2)) {
        let nx = j.axis("X").unwrap().size();
        let ch = Channel::from_rows("X", "W", rows[..nx].to_vec()).unwrap();
        let ext = j.attach_channel(&ch, "X").unwrap();
        prop_assert!(ext.markov_residual(&["W"], &["X"], &["Y", "Z"]).unwrap() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degradedness_self_and_replay(b in stochastic_rows(3, 3), m in stochastic_rows(3, 2)) {
        let ch_b = Channel::from_rows("A", "B", b).unwrap();
        prop_assert!(degradedness_test(&ch_b, &ch_b.relabel("B", "E")).unwrap().feasible);
        let ch_e = ch_b.then(&Channel::from_rows("B", "E", m).unwrap()).unwrap();
        let v = degradedness_test(&ch_b, &ch_e).unwrap();
        prop_assert!(v.feasible);
        let w = v.witness.unwrap();
        prop_assert!(replay_residual(&ch_b, &w, &ch_e) <= 1e-7);
    }

    #[test]
    fn vmaps_recover_c(m in weights(12)) {
        let j = JointDistribution::from_sizes(&[("A", 2), ("C", 3), ("E", 2)], m).unwrap();
        for v in enumerate_vmaps(&j).unwrap() {
            prop_assert!(v.residual(&j).unwrap() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn search_beats_constant_u_and_tracks_grid(j in binary_abe()) {
        let best = maximize_delta_uncoded(&j, 4, &SearchBudget::default()).unwrap();
        let trivial = (j.mi(&["A"], &["B"], &[]).unwrap() - j.mi(&["A"], &["E"], &[]).unwrap()).max(0.0);
        prop_assert!(best.delta >= trivial - 1e-12);
        let grid = oracle_grid_u(&j, 2, 0.05).unwrap();
        prop_assert!(best.delta >= grid.delta - 0.01, "search {} grid {}", best.delta, grid.delta);
    }

    #[test]
    fn nested_search_monotone(j in binary_abe(), seed in any::<u64>()) {
        let runs = maximize_delta_nested(&j, 4, &fast_budget(seed)).unwrap();
        for w in runs.windows(2) {
            prop_assert!(w[1].delta >= w[0].delta - 1e-12);
        }
    }

    #[test]
    fn degraded_eve_needs_no_auxiliary(pa in 0.1..0.9f64, b in stochastic_rows(2, 2), m in stochastic_rows(2, 2)) {
        let ch_b = Channel::from_rows("A", "B", b).unwrap();
        let ch_e = ch_b.then(&Channel::from_rows("B", "E", m).unwrap()).unwrap();
        prop_assume!(degradedness_test(&ch_b, &ch_e).unwrap().feasible);
        let j = JointDistribution::single("A", vec![pa, 1.0 - pa])
            .unwrap()
            .attach_channel(&ch_b, "A")
            .unwrap()
            .attach_channel(&ch_e, "A")
            .unwrap();
        let best = maximize_delta_uncoded(&j, 4, &fast_budget(3)).unwrap();
        let trivial = (j.mi(&["A"], &["B"], &[]).unwrap() - j.mi(&["A"], &["E"], &[]).unwrap()).max(0.0);
        prop_assert!(best.delta <= trivial + 1e-9, "search {} constant {}", best.delta, trivial);
    }

    #[test]
    fn inner_never_exceeds_outer(m in weights(8), ra in 0.0..1.2f64, rc in 0.0..1.2f64) {
        let j = JointDistribution::from_sizes(&[("A", 2), ("C", 2), ("E", 2)], m).unwrap();
        let budget = fast_budget(1);
        let inner = TheoremEvaluator::inner(&j, 3, &budget).unwrap();
        let outer = TheoremEvaluator::outer(&j, 3, &budget).unwrap();
        if let Some(i) = inner.evaluate(ra, rc).delta {
            let o = outer.evaluate(ra, rc).delta;
            prop_assert!(o.is_some_and(|o| i <= o + 1e-9), "inner {i} outer {o:?}");
        }
    }

    #[test]
    fn uncoded_region_matches_theorem_with_b_as_c(pa in 0.1..0.9f64, pb in 0.0..0.45f64, pe in 0.0..0.45f64) {
        // B = BSC(pb)(A), E = BSC(pb)(B) composed with BSC(pe): degraded, so constant U is optimal
        let b = Channel::bsc("A", "B", pb).unwrap();
        let j_abe = JointDistribution::single("A", vec![pa, 1.0 - pa])
            .unwrap()
            .attach_channel(&b, "A")
            .unwrap()
            .attach_channel(&Channel::bsc("B", "E", pe).unwrap(), "B")
            .unwrap();
        let u = maximize_delta_uncoded(&j_abe, 3, &fast_budget(2)).unwrap().u;
        let c2 = corollary2_region(&j_abe, UInput::Channel(&u)).unwrap();
        let j_ace = j_abe.rename("B", "C").unwrap();
        let ev = TheoremEvaluator::inner(&j_ace, 3, &fast_budget(2)).unwrap();
        let full = ev.candidates.iter().find(|c| c.v.labels() == 2).unwrap();
        prop_assert!((full.bracket - c2.get("[I(A;B|U) - I(A;E|U)]^+").unwrap()).abs() <= 1e-6);
        prop_assert!((full.h_a_given_v - c2.get("H(A|B)").unwrap()).abs() <= 1e-6);
    }
}

fn region_point() -> impl Strategy<Value = (JointDistribution, (f64, f64, f64), f64)> {
    (weights(4), (0.0..1.5f64, 0.0..1.5f64, 0.0..1.2f64), 0.0..0.5f64).prop_map(|(m, p, extra)| {
        (JointDistribution::from_sizes(&[("A", 2), ("C", 2)], m).unwrap(), p, extra)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn membership_monotone_in_upper_bounds((j, (ra, rc, d), extra) in region_point()) {
        let rd = corollary1_region(&j).unwrap();
        let p = RatePoint::triple(ra, rc, d);
        let before = contains(&rd, &p).unwrap();
        let mut looser = rd.clone();
        for q in &mut looser.inequalities {
            if q.sense == Sense::Le {
                q.bound += extra;
            }
        }
        if before.member {
            prop_assert!(contains(&looser, &p).unwrap().member);
            let closed = rd.clone().with_semantics(Semantics::DeltaDownwardClosed);
            prop_assert!(contains(&closed, &p).unwrap().member);
        }
    }

    #[test]
    fn convexify_is_idempotent(pts in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, prop::option::of(0.0..1.0f64)), 1..12)) {
        let points = pts
            .into_iter()
            .map(|(ra, rc, delta)| FrontierPoint {
                ra,
                rc,
                delta,
                provenance: match delta {
                    Some(_) => Provenance::Aux { u: vec![vec![1.0]], v: vec![0] },
                    None => Provenance::Infeasible,
                },
            })
            .collect();
        let once = convexify(&FrontierSamples::new(points));
        let twice = convexify(&once);
        for (a, b) in once.points.iter().zip(&twice.points) {
            match (a.delta, b.delta) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn eve_placement_orders_rates(j in binary_abe()) {
        let at_bob = eve_si_regions(&j, EvePlacement::AtBob).unwrap();
        let at_alice = eve_si_regions(&j, EvePlacement::AtAlice).unwrap();
        // Bob holding E can only lower Alice's rate; the equivocation cap is shared
        prop_assert!(at_bob.get("H(A|B,E)").unwrap() <= at_alice.get("H(A|B)").unwrap() + 1e-12);
        prop_assert_eq!(at_bob.get("I(A;B|E)"), at_alice.get("I(A;B|E)"));
        let direct = j.h(&["A"], &["E"]).unwrap() - j.h(&["A"], &["B", "E"]).unwrap();
        prop_assert!((at_bob.get("I(A;B|E)").unwrap() - direct).abs() <= 1e-12);
    }
}
