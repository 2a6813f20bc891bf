//! Property tests for the exact oracle.

use proptest::prelude::*;

use bht_core::divergences::{binary_entropy, e_gamma_slices, js_alpha};
use bht_core::exact::{bayes_error_exact, np_curve_point};
use bht_core::Distribution;

fn dist(k: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.0..1.0f64, k).prop_filter_map("positive mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| Distribution::from_probs(w.iter().map(|x| x / s).collect()).unwrap())
    })
}

fn pair() -> impl Strategy<Value = (Distribution, Distribution)> {
    (2usize..=4).prop_flat_map(|k| (dist(k), dist(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn error_non_increasing_in_n((p, q) in pair(), alpha in 0.01..0.99f64) {
        let mut prev = bayes_error_exact(&p, &q, alpha, 0).unwrap();
        for n in 1..=12 {
            let e = bayes_error_exact(&p, &q, alpha, n).unwrap();
            prop_assert!(e <= prev + 1e-12, "n={n}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn error_is_prior_times_one_minus_e_gamma((p, q) in pair(), alpha in 0.01..0.99f64, n in 1usize..=4) {
        let pn = p.product_power(n).unwrap();
        let qn = q.product_power(n).unwrap();
        let gamma = (1.0 - alpha) / alpha;
        let via_e = alpha * (1.0 - e_gamma_slices(pn.probs(), qn.probs(), gamma));
        let e = bayes_error_exact(&p, &q, alpha, n as u64).unwrap();
        prop_assert!((e - via_e).abs() <= 1e-10, "{e} vs {via_e}");
    }

    #[test]
    fn fano_consistency((p, q) in pair(), alpha in 0.01..0.5f64, n in 0u64..=20) {
        let e = bayes_error_exact(&p, &q, alpha, n).unwrap();
        let js = js_alpha(&p, &q, alpha).unwrap();
        prop_assert!(binary_entropy(e) >= binary_entropy(alpha) - n as f64 * js - 1e-9);
    }

    #[test]
    fn np_curve_non_increasing((p, q) in pair(), n in 1u64..=6) {
        let mut prev = np_curve_point(&p, &q, n, 0.0).unwrap();
        for i in 1..=50 {
            let v = np_curve_point(&p, &q, n, i as f64 / 50.0).unwrap();
            prop_assert!(v <= prev + 1e-12);
            prev = v;
        }
        prop_assert!(prev.abs() <= 1e-12);
    }
}
