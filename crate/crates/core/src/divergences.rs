//! Divergences and information quantities on finite distributions.
//!
//! Every kernel is written as a sum of nonnegative per-atom terms, so there is
//! no cancellation between large partial sums. Zero conventions are explicit:
//! `0 f(0/0) = 0`, `0^λ x^{1-λ} = 0`, and `p ln(p/0) = +inf` for `p > 0`.
//!
//! Hellinger normalization: `h²(p,q) = 0.5 Σ (√p_i − √q_i)² = 1 − Σ √(p_i q_i)`,
//! so `h²` coincides with `H_λ` at `λ = 1/2` (no factor of 2).

use serde::{Deserialize, Serialize};

use crate::distribution::{check_aligned, Distribution};
use crate::error::{Error, Result};
use crate::numeric::{ksum, xlogx, KahanSum};

/// Prior on `p` and the derived hockey-stick parameter `γ = (1−α)/α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorParams {
    pub alpha: f64,
    pub gamma_skew: f64,
}

impl PriorParams {
    /// Prior `alpha ∈ (0, 1/2]`, so that `γ ≥ 1`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::domain(format!("prior {alpha} outside (0, 1/2]")));
        }
        Ok(Self {
            alpha,
            gamma_skew: (1.0 - alpha) / alpha,
        })
    }
}

/// Exponent of the Hellinger-family divergence, optionally tied to a prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaParam {
    pub lambda: f64,
    pub r: Option<f64>,
}

impl LambdaParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::domain(format!("lambda {lambda} outside (0, 1)")));
        }
        Ok(Self { lambda, r: None })
    }

    /// `λ = r / ln(1/α)`.
    pub fn from_prior(r: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !(r >= 0.0) {
            return Err(Error::domain(format!("invalid (r, alpha) = ({r}, {alpha})")));
        }
        let lambda = r / (1.0 / alpha).ln();
        let mut out = Self::new(lambda)?;
        out.r = Some(r);
        Ok(out)
    }

    /// The linear-regime choice `λ = 0.5 ln 2 / ln(1/α)`, at most 1/2 for `α ≤ 1/2`.
    pub fn linear_for_prior(alpha: f64) -> Result<Self> {
        Self::from_prior(0.5 * std::f64::consts::LN_2, alpha.min(0.5))
    }

    pub fn bar(&self) -> f64 {
        1.0 - self.lambda
    }
}

/// Total variation, squared Hellinger and `KL(p‖q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicDivergences {
    pub tv: f64,
    pub hellinger_sq: f64,
    pub kl_pq: f64,
}

// ---------------------------------------------------------------------------
// Scalar per-atom kernels.

/// `φ(x) = x ln x − x + 1`, the KL generator shifted to be nonnegative.
#[inline]
pub fn kl_generator(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let d = x - 1.0;
    if d.abs() < 0.05 {
        // Σ_{k≥2} (−d)^k / (k(k−1))
        let mut pow = d * d;
        let mut s = 0.0;
        for k in 2..18u32 {
            let kf = k as f64;
            let term = pow / (kf * (kf - 1.0));
            s += if k % 2 == 0 { term } else { -term };
            pow *= d;
        }
        s
    } else {
        x * d.ln_1p() - d
    }
}

/// `λ e^u + (1−λ) − e^{λu}` for `u ≤ 0`, computed without cancellation.
#[inline]
fn affinity_gap(u: f64, lambda: f64) -> f64 {
    if u.abs() <= 0.5 {
        // Σ_{k≥2} (λ − λ^k) u^k / k!
        let mut upow = u;
        let mut lpow = lambda;
        let mut fact = 1.0;
        let mut s = 0.0;
        for k in 2..28u32 {
            upow *= u;
            lpow *= lambda;
            fact *= k as f64;
            s += (lambda - lpow) * upow / fact;
        }
        s
    } else {
        lambda * u.exp_m1() - (lambda * u).exp_m1()
    }
}

/// One atom of `H_λ`: `λ p + (1−λ) q − p^λ q^{1−λ}` (nonnegative, sums to `H_λ`).
#[inline]
pub fn h_lambda_term(p: f64, q: f64, lambda: f64) -> f64 {
    if p == 0.0 {
        return (1.0 - lambda) * q;
    }
    if q == 0.0 {
        return lambda * p;
    }
    if p <= q {
        q * affinity_gap((p / q).ln(), lambda)
    } else {
        p * affinity_gap((q / p).ln(), 1.0 - lambda)
    }
}

/// One atom of `JS_α`: `α m φ(p/m) + (1−α) m φ(q/m)` with `m = α p + (1−α) q`.
#[inline]
pub fn js_alpha_term(p: f64, q: f64, alpha: f64) -> f64 {
    let m = alpha * p + (1.0 - alpha) * q;
    if m == 0.0 {
        return 0.0;
    }
    m * (alpha * kl_generator(p / m) + (1.0 - alpha) * kl_generator(q / m))
}

// ---------------------------------------------------------------------------
// Slice-level kernels (no validation; callers ensure equal lengths).

pub fn h_lambda_slices(p: &[f64], q: &[f64], lambda: f64) -> f64 {
    ksum(p.iter().zip(q).map(|(&a, &b)| h_lambda_term(a, b, lambda))).clamp(0.0, 1.0)
}

pub fn js_alpha_slices(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    ksum(p.iter().zip(q).map(|(&a, &b)| js_alpha_term(a, b, alpha))).max(0.0)
}

pub fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * ksum(p.iter().zip(q).map(|(&a, &b)| (a - b).abs()))).clamp(0.0, 1.0)
}

pub fn hellinger_sq_slices(p: &[f64], q: &[f64]) -> f64 {
    let s = ksum(p.iter().zip(q).map(|(&a, &b)| {
        let d = a.sqrt() - b.sqrt();
        d * d
    }));
    (0.5 * s).clamp(0.0, 1.0)
}

pub fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for (&a, &b) in p.iter().zip(q) {
        if b == 0.0 {
            if a > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        acc.add(b * kl_generator(a / b));
    }
    acc.value().max(0.0)
}

pub fn e_gamma_slices(p: &[f64], q: &[f64], gamma: f64) -> f64 {
    ksum(p.iter().zip(q).map(|(&a, &b)| (a - gamma * b).max(0.0))).clamp(0.0, 1.0)
}

/// Shannon entropy in nats.
pub fn entropy_slice(p: &[f64]) -> f64 {
    -ksum(p.iter().map(|&x| xlogx(x)))
}

// ---------------------------------------------------------------------------
// Bernoulli fast paths. `p` and `q` are the masses on the symbol `1`.

pub fn h_lambda_ber(p: f64, q: f64, lambda: f64) -> f64 {
    (h_lambda_term(1.0 - p, 1.0 - q, lambda) + h_lambda_term(p, q, lambda)).clamp(0.0, 1.0)
}

pub fn js_alpha_ber(p: f64, q: f64, alpha: f64) -> f64 {
    (js_alpha_term(1.0 - p, 1.0 - q, alpha) + js_alpha_term(p, q, alpha)).max(0.0)
}

pub fn hellinger_sq_ber(p: f64, q: f64) -> f64 {
    h_lambda_ber(p, q, 0.5)
}

// ---------------------------------------------------------------------------
// Public validated API.

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(())
}

pub fn classic_divergences(p: &Distribution, q: &Distribution) -> Result<ClassicDivergences> {
    check_aligned(p, q)?;
    Ok(ClassicDivergences {
        tv: tv_slices(p.probs(), q.probs()),
        hellinger_sq: hellinger_sq_slices(p.probs(), q.probs()),
        kl_pq: kl_slices(p.probs(), q.probs()),
    })
}

/// `H_λ(p,q) = 1 − Σ p_i^λ q_i^{1−λ}`.
pub fn h_lambda(p: &Distribution, q: &Distribution, lam: LambdaParam) -> Result<f64> {
    check_aligned(p, q)?;
    if !(lam.lambda > 0.0 && lam.lambda < 1.0) {
        return Err(Error::domain(format!("lambda {} outside (0, 1)", lam.lambda)));
    }
    Ok(h_lambda_slices(p.probs(), q.probs(), lam.lambda))
}

/// Skewed Jensen–Shannon divergence `α KL(p‖m) + (1−α) KL(q‖m)`, `m = αp + (1−α)q`.
pub fn js_alpha(p: &Distribution, q: &Distribution, alpha: f64) -> Result<f64> {
    check_aligned(p, q)?;
    check_alpha(alpha)?;
    Ok(js_alpha_slices(p.probs(), q.probs(), alpha))
}

/// Hockey-stick divergence `Σ (p_i − γ q_i)_+` for `γ ≥ 1`.
pub fn e_gamma(p: &Distribution, q: &Distribution, gamma: f64) -> Result<f64> {
    check_aligned(p, q)?;
    if !(gamma >= 1.0) {
        return Err(Error::domain(format!("gamma {gamma} must be at least 1")));
    }
    Ok(e_gamma_slices(p.probs(), q.probs(), gamma))
}

/// `I(Θ; X)` for `Θ ~ Ber(α)` selecting `p`, via `H(m) − αH(p) − (1−α)H(q)`.
pub fn mutual_info_binary(p: &Distribution, q: &Distribution, alpha: f64) -> Result<f64> {
    check_aligned(p, q)?;
    check_alpha(alpha)?;
    let m: Vec<f64> = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    let mut acc = KahanSum::new();
    acc.add(entropy_slice(&m));
    acc.add(-alpha * entropy_slice(p.probs()));
    acc.add(-(1.0 - alpha) * entropy_slice(q.probs()));
    Ok(acc.value().max(0.0))
}

/// `H_λ` of the n-fold product given the single-sample value.
pub fn tensorize_h_lambda(h_val: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if h_val >= 1.0 {
        return 1.0;
    }
    -((n as f64) * (-h_val).ln_1p()).exp_m1()
}

/// Entropy of Ber(x) in nats.
pub fn binary_entropy(x: f64) -> f64 {
    -(xlogx(x) + xlogx(1.0 - x))
}
