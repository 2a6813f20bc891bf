//! Regime dispatch and certified-bound checks against the exact oracle.

use proptest::prelude::*;

use bht_core::exact::{n_star_bayes_exact, TestingInstance, DEFAULT_N_CAP};
use bht_core::formulas::{n_star_bayes_estimate, regime_of, sublinear_parameters, Regime};
use bht_core::instances::{log_uniform, random_pair_with_h2, seeded_rng};

#[test]
fn every_parameter_gets_one_regime() {
    for i in 1..=60 {
        let alpha = 0.5 * 0.8f64.powi(i - 1);
        let mut deltas: Vec<f64> = (0..200).map(|j| alpha * 10f64.powf(-(j as f64) / 20.0)).collect();
        deltas.extend([alpha / 4.0, alpha / 100.0, alpha * alpha]);
        for d in deltas {
            let r = regime_of(alpha, d);
            let expect = if d >= alpha {
                Regime::Vacuous
            } else if d > alpha / 4.0 {
                Regime::WeakDetection
            } else if d <= alpha * alpha {
                Regime::Polynomial
            } else if d <= alpha / 100.0 {
                Regime::Sublinear
            } else {
                Regime::Linear
            };
            assert_eq!(r, expect, "alpha={alpha}, delta={d}");
        }
        if alpha / 100.0 > alpha * alpha {
            assert_eq!(regime_of(alpha, alpha / 100.0), Regime::Sublinear);
        }
        if alpha * alpha <= alpha / 4.0 {
            assert_eq!(regime_of(alpha, alpha * alpha), Regime::Polynomial);
        }
    }
}

proptest! {
    #[test]
    fn sublinear_split_brackets_delta(a_exp in 2.5..12.0f64, frac in 0.0..1.0f64) {
        let alpha = 10f64.powf(-a_exp);
        // delta strictly inside (alpha^2, alpha/100].
        let (lo, hi) = ((alpha * alpha).ln(), (alpha / 100.0).ln());
        let delta = (lo + (hi - lo) * (0.001 + 0.998 * frac)).exp();
        prop_assume!(regime_of(alpha, delta) == Regime::Sublinear);
        let (t, ap) = sublinear_parameters(alpha, delta);
        let root = delta.powf(1.0 / t as f64);
        prop_assert!(root >= ap / 64.0 * (1.0 - 1e-12) && root <= ap / 8.0 * (1.0 + 1e-12),
            "T={t}, alpha'={ap}, delta^(1/T)={root}");
    }
}

#[test]
fn certified_bounds_contain_oracle() {
    let mut rng = seeded_rng(17);
    for i in 0..60 {
        let k = 2 + i % 3;
        let (p, q) = random_pair_with_h2(&mut rng, k, 0.04, 0.125).unwrap();
        let alpha = log_uniform(&mut rng, 1e-3, 0.5);
        let delta = alpha * [0.25, 0.1, 0.02, 0.005][i % 4];
        let est = n_star_bayes_estimate(&p, &q, alpha, delta).unwrap();
        let inst = TestingInstance::bayesian(p.clone(), q.clone(), alpha, delta).unwrap();
        let n = n_star_bayes_exact(&inst, DEFAULT_N_CAP).unwrap().or_max();
        assert!(est.lower <= est.point && est.point <= est.upper);
        assert!(est.contains(n), "n*={n}, estimate {est:?}");
    }
}
