//! Least favorable pairs for total-variation contamination.
//!
//! For radius `ε` the pair `(p′, q′)` is obtained by clipping the likelihood
//! ratio `p/q` to `[lo, hi]`. On `{p > hi q}` both laws are replaced by
//! multiples of `w = (p + q)/(1 + hi)` with ratio `hi`, which moves exactly
//! `Σ (p − hi q)/(1 + hi)` of mass; the low side is symmetric. The thresholds
//! are chosen so each side moves exactly `ε`.

use serde::Serialize;

use crate::distribution::{check_aligned, Distribution};
use crate::divergences::tv_slices;
use crate::error::{Error, Result};

/// Budget accuracy required of the constructed pair.
pub const LFD_TV_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfdPair {
    pub p_prime: Distribution,
    pub q_prime: Distribution,
    pub epsilon: f64,
    /// Likelihood-ratio clip thresholds (not logarithms).
    pub clip_lo: f64,
    pub clip_hi: f64,
    pub tv_p: f64,
    pub tv_q: f64,
}

impl LfdPair {
    /// Largest relative deviation of `p′/q′` from `clamp(p/q, lo, hi)` over
    /// symbols where both primed masses are positive.
    pub fn clipping_error(&self, p: &Distribution, q: &Distribution) -> f64 {
        let pp = self.p_prime.probs();
        let qp = self.q_prime.probs();
        let mut worst: f64 = 0.0;
        for i in 0..pp.len() {
            if pp[i] > 0.0 && qp[i] > 0.0 {
                let want = (p.probs()[i] / q.probs()[i]).clamp(self.clip_lo, self.clip_hi);
                worst = worst.max((pp[i] / qp[i] - want).abs() / want);
            }
        }
        worst
    }
}

/// Mass moved on the high side at threshold `c`: `Σ_{p > c q} (p − c q)/(1 + c)`.
fn moved_high(p: &[f64], q: &[f64], c: f64) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, &b)| a > c * b)
        .map(|(&a, &b)| (a - c * b) / (1.0 + c))
        .sum()
}

/// Mass moved on the low side at threshold `c`: `Σ_{p < c q} (c q − p)/(1 + c)`.
fn moved_low(p: &[f64], q: &[f64], c: f64) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, &b)| a < c * b)
        .map(|(&a, &b)| (c * b - a) / (1.0 + c))
        .sum()
}

/// Bisection on `c ∈ [lo, hi]` for a monotone `f(c) = target`, then one exact
/// solve on the region fixed by the bracket.
fn solve_threshold<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(
    f: F,
    increasing: bool,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    polish: G,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = f(mid) < target;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = polish(0.5 * (lo + hi));
    if c.is_finite() && c >= lo && c <= hi {
        c
    } else {
        0.5 * (lo + hi)
    }
}

/// Least favorable pair for contamination radius `epsilon`.
///
/// Requires `0 ≤ ε < TV(p, q)/2`; at `ε = 0` the inputs are returned with
/// thresholds at the extreme finite ratios.
pub fn huber_lfd(p: &Distribution, q: &Distribution, epsilon: f64) -> Result<LfdPair> {
    check_aligned(p, q)?;
    let (pp, qq) = (p.probs(), q.probs());
    let tv = tv_slices(pp, qq);
    if !(epsilon >= 0.0 && epsilon < 0.5 * tv) {
        return Err(Error::domain(format!(
            "epsilon = {epsilon} must lie in [0, TV/2) = [0, {})",
            0.5 * tv
        )));
    }
    if epsilon == 0.0 {
        let ratios = pp
            .iter()
            .zip(qq)
            .filter(|(&a, &b)| a > 0.0 && b > 0.0)
            .map(|(&a, &b)| a / b);
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0_f64), |(l, h), r| (l.min(r), h.max(r)));
        return Ok(LfdPair {
            p_prime: p.clone(),
            q_prime: q.clone(),
            epsilon,
            clip_lo: if lo.is_finite() { lo } else { 0.0 },
            clip_hi: if hi > 0.0 { hi } else { f64::INFINITY },
            tv_p: 0.0,
            tv_q: 0.0,
        });
    }

    // moved_high decreases from TV/2 at c = 1 to below 1/(1+c); moved_low
    // increases from 0 at c = 0 to TV/2 at c = 1.
    let hi = solve_threshold(
        |c| moved_high(pp, qq, c),
        false,
        1.0,
        1.0 / epsilon + 1.0,
        epsilon,
        |c| {
            let (ph, qh) = region_mass(pp, qq, |a, b| a > c * b);
            (ph - epsilon) / (qh + epsilon)
        },
    );
    let lo = solve_threshold(
        |c| moved_low(pp, qq, c),
        true,
        0.0,
        1.0,
        epsilon,
        |c| {
            let (pl, ql) = region_mass(pp, qq, |a, b| a < c * b);
            (epsilon + pl) / (ql - epsilon)
        },
    );

    let mut p_new = Vec::with_capacity(pp.len());
    let mut q_new = Vec::with_capacity(pp.len());
    for (&a, &b) in pp.iter().zip(qq) {
        if a > hi * b {
            let w = (a + b) / (1.0 + hi);
            p_new.push(hi * w);
            q_new.push(w);
        } else if a < lo * b {
            let w = (a + b) / (1.0 + lo);
            p_new.push(lo * w);
            q_new.push(w);
        } else {
            p_new.push(a);
            q_new.push(b);
        }
    }
    let p_prime = Distribution::new(p.labels().to_vec(), p_new)?;
    let q_prime = Distribution::new(q.labels().to_vec(), q_new)?;
    let tv_p = tv_slices(pp, p_prime.probs());
    let tv_q = tv_slices(qq, q_prime.probs());
    Ok(LfdPair {
        p_prime,
        q_prime,
        epsilon,
        clip_lo: lo,
        clip_hi: hi,
        tv_p,
        tv_q,
    })
}

fn region_mass<F: Fn(f64, f64) -> bool>(p: &[f64], q: &[f64], inside: F) -> (f64, f64) {
    p.iter()
        .zip(q)
        .filter(|(&a, &b)| inside(a, b))
        .fold((0.0, 0.0), |(sp, sq), (&a, &b)| (sp + a, sq + b))
}
