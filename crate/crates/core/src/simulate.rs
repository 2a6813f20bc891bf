//! Monte Carlo estimates of likelihood-ratio test errors.
//!
//! Trials are split into fixed blocks of [`BLOCK`] trials. Block `b` draws
//! from ChaCha8 seeded with `seed` on stream `b`, so results are identical for
//! any number of worker threads.
//!
//! The test decides `p` when the summed log-likelihood ratio is strictly
//! above the threshold; ties go to `q`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::distribution::{check_aligned, Distribution};
use crate::error::{Error, Result};
use crate::exact::build_llr_table;
use crate::reductions::binomial_upper_tail;

/// Trials per RNG stream.
pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Samples per test (per bucket when boosting).
    pub n: u64,
    /// Log-likelihood-ratio threshold; `None` means `ln((1−α)/α)`.
    pub threshold: Option<f64>,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, n: u64) -> Self {
        Self {
            trials,
            seed,
            n,
            threshold: None,
        }
    }

    fn threshold_for(&self, alpha: f64) -> f64 {
        self.threshold.unwrap_or(((1.0 - alpha) / alpha).ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub errors: u64,
    pub err_hat: f64,
    /// Clopper–Pearson 95% interval.
    pub ci95: (f64, f64),
}

impl SimResult {
    pub fn contains(&self, x: f64) -> bool {
        self.ci95.0 <= x && x <= self.ci95.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostedSimResult {
    pub sim: SimResult,
    pub buckets: u32,
    /// Exact per-bucket error under `p` and under `q`.
    pub tau_p: f64,
    pub tau_q: f64,
    /// Exact prior-weighted error of the majority vote.
    pub exact_error: f64,
    /// `τ^{T/32}` with `τ = max(τ_p, τ_q)`.
    pub repetition_bound: f64,
}

/// Exact two-sided 95% interval for a binomial proportion.
pub fn clopper_pearson(errors: u64, trials: u64) -> (f64, f64) {
    let (x, n) = (errors as f64, trials as f64);
    let lo = if errors == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).map_or(0.0, |b| b.inverse_cdf(0.025))
    };
    let hi = if errors >= trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).map_or(1.0, |b| b.inverse_cdf(0.975))
    };
    (lo, hi)
}

struct Sampler {
    llr: Vec<f64>,
    from_p: WeightedIndex<f64>,
    from_q: WeightedIndex<f64>,
}

impl Sampler {
    fn new(p: &Distribution, q: &Distribution) -> Result<Self> {
        let bad = |e| Error::InvalidDistribution(format!("cannot sample: {e}"));
        Ok(Self {
            llr: p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a / b).ln()).collect(),
            from_p: WeightedIndex::new(p.probs()).map_err(bad)?,
            from_q: WeightedIndex::new(q.probs()).map_err(bad)?,
        })
    }

    /// One trial of the `t`-bucket majority test; true on error.
    fn trial<R: Rng>(&self, rng: &mut R, alpha: f64, n: u64, t: u32, thr: f64) -> bool {
        let truth_p = rng.random::<f64>() < alpha;
        let src = if truth_p { &self.from_p } else { &self.from_q };
        let mut votes_p = 0u32;
        for _ in 0..t {
            let mut s = 0.0;
            for _ in 0..n {
                s += self.llr[src.sample(rng)];
            }
            if s > thr {
                votes_p += 1;
            }
        }
        let says_p = 2 * votes_p > t;
        says_p != truth_p
    }
}

fn run(p: &Distribution, q: &Distribution, alpha: f64, t: u32, cfg: &SimConfig) -> Result<SimResult> {
    check_aligned(p, q)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    if cfg.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let sampler = Sampler::new(p, q)?;
    let thr = cfg.threshold_for(alpha);
    let blocks = cfg.trials.div_ceil(BLOCK);
    let errors: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let count = BLOCK.min(cfg.trials - b * BLOCK);
            (0..count)
                .filter(|_| sampler.trial(&mut rng, alpha, cfg.n, t, thr))
                .count() as u64
        })
        .sum();
    Ok(SimResult {
        trials: cfg.trials,
        errors,
        err_hat: errors as f64 / cfg.trials as f64,
        ci95: clopper_pearson(errors, cfg.trials),
    })
}

/// Empirical Bayes error of the `n`-sample likelihood-ratio test.
pub fn simulate_lrt(p: &Distribution, q: &Distribution, alpha: f64, cfg: &SimConfig) -> Result<SimResult> {
    run(p, q, alpha, 1, cfg)
}

/// Exact per-test errors `(P_p(say q), P_q(say p))` at the given threshold.
pub fn lrt_bucket_errors(p: &Distribution, q: &Distribution, n: u64, threshold: f64) -> Result<(f64, f64)> {
    let table = build_llr_table(p, q, n)?;
    let (mut tp, mut tq) = (0.0, 0.0);
    for a in table.atoms() {
        if a.llr > threshold {
            tq += a.q;
        } else {
            tp += a.p;
        }
    }
    Ok((tp.min(1.0), tq.min(1.0)))
}

/// Exact prior-weighted error of a `t`-bucket majority whose buckets err with
/// probability `tau_p` under `p` and `tau_q` under `q`; a tied vote says `q`.
pub fn boosted_exact_error(alpha: f64, tau_p: f64, tau_q: f64, t: u32) -> f64 {
    alpha * binomial_upper_tail(t, tau_p, t.div_ceil(2)) + (1.0 - alpha) * binomial_upper_tail(t, tau_q, t / 2 + 1)
}

/// Empirical error of the majority over `t` independent `n`-sample tests.
///
/// Fails with a domain error if either exact bucket error exceeds 1/4.
pub fn simulate_boosted(
    p: &Distribution,
    q: &Distribution,
    alpha: f64,
    t: u32,
    cfg: &SimConfig,
) -> Result<BoostedSimResult> {
    if t == 0 {
        return Err(Error::domain("need at least one bucket"));
    }
    check_aligned(p, q)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    let (tau_p, tau_q) = lrt_bucket_errors(p, q, cfg.n, cfg.threshold_for(alpha))?;
    let tau = tau_p.max(tau_q);
    if tau > 0.25 {
        return Err(Error::domain(format!(
            "bucket error {tau} exceeds 1/4 (tau_p = {tau_p}, tau_q = {tau_q})"
        )));
    }
    let sim = run(p, q, alpha, t, cfg)?;
    Ok(BoostedSimResult {
        sim,
        buckets: t,
        tau_p,
        tau_q,
        exact_error: boosted_exact_error(alpha, tau_p, tau_q, t),
        repetition_bound: tau.powf(t as f64 / 32.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::bayes_error_exact;

    fn ber(x: f64) -> Distribution {
        Distribution::bernoulli(x).unwrap()
    }

    #[test]
    fn identical_pair_errs_at_prior() {
        let p = Distribution::from_probs(vec![0.2, 0.5, 0.3]).unwrap();
        let r = simulate_lrt(&p, &p, 0.3, &SimConfig::new(20_000, 1, 4)).unwrap();
        assert!(r.contains(0.3), "{r:?}");
    }

    #[test]
    fn symmetric_pair_single_sample() {
        let r = simulate_lrt(&ber(0.3), &ber(0.7), 0.5, &SimConfig::new(20_000, 2, 1)).unwrap();
        assert!(r.contains(0.3), "{r:?}");
    }

    #[test]
    fn deterministic_under_thread_count() {
        let cfg = SimConfig::new(3 * BLOCK + 17, 99, 5);
        let a = simulate_lrt(&ber(0.2), &ber(0.6), 0.3, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_lrt(&ber(0.2), &ber(0.6), 0.3, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn one_bucket_is_plain_test() {
        let cfg = SimConfig::new(10_000, 5, 30);
        let a = simulate_lrt(&ber(0.2), &ber(0.6), 0.4, &cfg).unwrap();
        let b = simulate_boosted(&ber(0.2), &ber(0.6), 0.4, 1, &cfg).unwrap();
        assert_eq!(a, b.sim);
        let exact = bayes_error_exact(&ber(0.2), &ber(0.6), 0.4, 30).unwrap();
        assert!((b.exact_error - exact).abs() < 1e-12);
    }

    #[test]
    fn boosted_error_within_interval_and_bound() {
        let cfg = SimConfig::new(40_000, 7, 6);
        let r = simulate_boosted(&ber(0.2), &ber(0.7), 0.5, 9, &cfg).unwrap();
        assert!(r.sim.contains(r.exact_error), "{r:?}");
        assert!(r.sim.err_hat <= r.repetition_bound + (r.sim.ci95.1 - r.sim.ci95.0));
    }

    #[test]
    fn boosting_hypothesis_enforced() {
        let cfg = SimConfig::new(100, 1, 1);
        assert!(matches!(
            simulate_boosted(&ber(0.4), &ber(0.6), 0.5, 3, &cfg),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn clopper_pearson_edges() {
        assert_eq!(clopper_pearson(0, 10).0, 0.0);
        assert_eq!(clopper_pearson(10, 10).1, 1.0);
        let (lo, hi) = clopper_pearson(5, 10);
        assert!((lo - 0.187086).abs() < 1e-5 && (hi - 0.812914).abs() < 1e-5);
    }
}
