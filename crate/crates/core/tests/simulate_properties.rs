//! Statistical calibration of the Monte Carlo harness.

use bht_core::exact::bayes_error_exact;
use bht_core::reductions::boost_error_bound;
use bht_core::simulate::{simulate_boosted, simulate_lrt, SimConfig};
use bht_core::Distribution;

#[test]
fn interval_covers_oracle_in_most_runs() {
    let p = Distribution::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
    let q = Distribution::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
    let (alpha, n) = (0.3, 5);
    let exact = bayes_error_exact(&p, &q, alpha, n).unwrap();
    let covered = (0..100u64)
        .filter(|&seed| {
            simulate_lrt(&p, &q, alpha, &SimConfig::new(2_000, seed, n))
                .unwrap()
                .contains(exact)
        })
        .count();
    assert!(covered >= 93, "covered {covered}/100");
}

#[test]
fn thirty_two_buckets_at_tau_one_fifth() {
    let p = Distribution::bernoulli(0.2).unwrap();
    let q = Distribution::bernoulli(0.8).unwrap();
    let r = simulate_boosted(&p, &q, 0.5, 32, &SimConfig::new(50_000, 3, 1)).unwrap();
    assert!((r.tau_p - 0.2).abs() < 1e-12 && (r.tau_q - 0.2).abs() < 1e-12);
    let width = r.sim.ci95.1 - r.sim.ci95.0;
    assert!(r.sim.err_hat <= 0.2 + width);
    assert!(r.sim.err_hat <= r.repetition_bound + width);
    assert!(r.sim.contains(r.exact_error), "{r:?}");
    // Symmetric buckets: the exact error equals the majority tail (ties say q).
    let b = boost_error_bound(0.2, 32).unwrap();
    assert!(r.exact_error <= b.exact_tail + 1e-15);
}

#[test]
fn seed_determinism() {
    let p = Distribution::from_probs(vec![0.6, 0.4]).unwrap();
    let q = Distribution::from_probs(vec![0.3, 0.7]).unwrap();
    let cfg = SimConfig::new(10_000, 99, 3);
    let a = simulate_lrt(&p, &q, 0.4, &cfg).unwrap();
    let b = simulate_lrt(&p, &q, 0.4, &cfg).unwrap();
    assert_eq!(a.err_hat.to_bits(), b.err_hat.to_bits());
}
