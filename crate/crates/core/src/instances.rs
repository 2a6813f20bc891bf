//! Seeded random distributions and testing pairs.
//!
//! All generators take an explicit RNG so experiments are reproducible from a
//! single `u64` seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::distribution::Distribution;
use crate::divergences::hellinger_sq_slices;
use crate::error::{Error, Result};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the simplex (flat Dirichlet), with each coordinate
/// independently zeroed with probability `zero_prob`. At least one atom is
/// always kept.
pub fn random_probs<R: Rng + ?Sized>(rng: &mut R, k: usize, zero_prob: f64) -> Vec<f64> {
    assert!(k > 0, "k must be positive");
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if zero_prob > 0.0 && rng.random::<f64>() < zero_prob {
                0.0
            } else {
                rng.sample::<f64, _>(Exp1)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        let i = rng.random_range(0..k);
        w[i] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, k: usize, zero_prob: f64) -> Distribution {
    Distribution::from_probs(random_probs(rng, k, zero_prob)).expect("simplex draw is a distribution")
}

fn mix(p: &[f64], r: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(r).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

/// A pair `(p, q)` on `k` symbols with squared Hellinger distance close to a
/// uniform draw from `[h2_lo, h2_hi]`.
///
/// `q` is the mixture `(1−t) p + t r` for an independent `r`; the distance is
/// increasing in `t`, so `t` is found by bisection.
pub fn random_pair_with_h2<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    h2_lo: f64,
    h2_hi: f64,
) -> Result<(Distribution, Distribution)> {
    if !(k >= 2 && 0.0 < h2_lo && h2_lo <= h2_hi && h2_hi < 1.0) {
        return Err(Error::domain(format!(
            "bad pair request k={k}, h2 in [{h2_lo}, {h2_hi}]"
        )));
    }
    for _ in 0..10_000 {
        let target = h2_lo + (h2_hi - h2_lo) * rng.random::<f64>();
        let p = random_probs(rng, k, 0.0);
        let r = random_probs(rng, k, 0.2);
        if hellinger_sq_slices(&p, &r) < target {
            continue;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if hellinger_sq_slices(&p, &mix(&p, &r, mid)) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = mix(&p, &r, hi);
        let h2 = hellinger_sq_slices(&p, &q);
        if h2 >= h2_lo && h2 <= h2_hi {
            return Ok((Distribution::from_probs(p)?, Distribution::from_probs(q)?));
        }
    }
    Err(Error::domain("could not reach the requested Hellinger range"))
}

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = random_probs(&mut seeded_rng(7), 5, 0.3);
        let b = random_probs(&mut seeded_rng(7), 5, 0.3);
        assert_eq!(a, b);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hellinger_range_respected() {
        let mut rng = seeded_rng(1);
        for k in 2..=4 {
            for _ in 0..20 {
                let (p, q) = random_pair_with_h2(&mut rng, k, 0.05, 0.125).unwrap();
                let h2 = hellinger_sq_slices(p.probs(), q.probs());
                assert!((0.05..=0.125).contains(&h2), "h2 = {h2}");
            }
        }
    }
}
