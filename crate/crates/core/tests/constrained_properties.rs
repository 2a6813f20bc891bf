//! Channel, quantizer and LDP invariants.

use proptest::prelude::*;

use bht_core::constrained::{ldp_feasible, optimal_quantizer_dp, Channel, Objective};
use bht_core::Distribution;

fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, k).prop_filter_map("positive mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
    })
}

fn pair_and_channel() -> impl Strategy<Value = (Distribution, Distribution, Channel)> {
    (2usize..=6, 1usize..=4).prop_flat_map(|(k, d)| {
        (simplex(k), simplex(k), prop::collection::vec(simplex(d), k)).prop_map(|(p, q, m)| {
            (
                Distribution::from_probs(p).unwrap(),
                Distribution::from_probs(q).unwrap(),
                Channel::new(m, None).unwrap(),
            )
        })
    })
}

fn objective() -> impl Strategy<Value = Objective> {
    prop_oneof![
        (0.01..0.99f64).prop_map(|lambda| Objective::HLambda { lambda }),
        (0.001..0.5f64).prop_map(|alpha| Objective::JsAlpha { alpha }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn channels_never_increase_objective((p, q, ch) in pair_and_channel(), obj in objective()) {
        let before = obj.value(p.probs(), q.probs());
        let after = obj.value(ch.push_forward(&p).unwrap().probs(), ch.push_forward(&q).unwrap().probs());
        prop_assert!(after <= before + 1e-12, "{after} > {before}");
    }

    #[test]
    fn quantizer_objective_bounded_by_input((p, q, _ch) in pair_and_channel(), obj in objective(), d in 1usize..=4) {
        let sol = optimal_quantizer_dp(&p, &q, d, &obj).unwrap();
        prop_assert!(sol.objective <= obj.value(p.probs(), q.probs()) + 1e-12);
    }

    #[test]
    fn ldp_feasibility_ignores_output_order(
        (_p, _q, ch) in pair_and_channel(),
        eps in 0.0..4.0f64,
        seed in any::<u64>(),
    ) {
        let mut perm: Vec<usize> = (0..ch.k_out()).collect();
        // Deterministic shuffle from the seed.
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let relabeled = ch.relabel_outputs(&perm).unwrap();
        prop_assert_eq!(ldp_feasible(&ch, eps), ldp_feasible(&relabeled, eps));
    }

    #[test]
    fn channel_json_round_trip((_p, _q, ch) in pair_and_channel()) {
        let back = Channel::from_json_str(&ch.to_json_string().unwrap()).unwrap();
        for (a, b) in ch.matrix().iter().zip(back.matrix()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() <= 1e-15 * x.abs().max(1e-300));
            }
        }
    }
}
