//! Boosting and self-reduction: plans, bounds, and oracle-backed checks.
//!
//! Only inequalities with explicit constants are asserted (the boosting tail
//! bound and the error-amplification lower bound). Relations that hold up to
//! unstated constants are reported as empirical ratios.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::exact::{n_star_bayes_exact, n_star_pf_exact, NStar, TestingInstance};
use crate::numeric::{ksum, ln_factorial_table};

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    SuccessAmplification,
    ErrorAmplification,
}

/// Splitting a problem into `T` buckets with per-bucket parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionPlan {
    pub t: u32,
    pub alpha_prime: f64,
    pub delta_prime: Option<f64>,
    pub beta_prime: Option<f64>,
    pub direction: Direction,
}

impl ReductionPlan {
    /// Bayesian reduction with an explicit `T`, requiring `(δ/α)^{1/T} ≤ 1/8` and `α^{1/T} ≤ 1/2`.
    pub fn bayesian(alpha: f64, delta: f64, t: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) || !(delta > 0.0 && delta < alpha / 8.0) || t == 0 {
            return Err(Error::domain(format!(
                "need alpha in (0, 1/2], delta in (0, alpha/8), T >= 1; got ({alpha}, {delta}, {t})"
            )));
        }
        let tf = t as f64;
        let a1 = alpha.powf(1.0 / tf);
        let ratio = (delta / alpha).powf(1.0 / tf);
        if ratio > 0.125 * (1.0 + SLACK) || a1 > 0.5 * (1.0 + SLACK) {
            return Err(Error::domain(format!(
                "T = {t} gives (delta/alpha)^(1/T) = {ratio:.4} and alpha^(1/T) = {a1:.4}; need <= 1/8 and <= 1/2"
            )));
        }
        Ok(Self {
            t,
            alpha_prime: a1,
            delta_prime: Some(delta.powf(1.0 / tf)),
            beta_prime: None,
            direction: Direction::SuccessAmplification,
        })
    }

    /// Prior-free reduction with an explicit `T`, requiring `max((2α)^{1/T}, (2β)^{1/T}) ≤ 1/4`.
    pub fn prior_free(alpha: f64, beta: f64, t: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.125) || !(beta > 0.0 && beta < 0.25) || t == 0 {
            return Err(Error::domain(format!(
                "need alpha in (0, 1/8), beta in (0, 1/4), T >= 1; got ({alpha}, {beta}, {t})"
            )));
        }
        let tf = t as f64;
        let worst = (2.0 * alpha).max(2.0 * beta).powf(1.0 / tf);
        if worst > 0.25 * (1.0 + SLACK) {
            return Err(Error::domain(format!(
                "T = {t} gives max((2a)^(1/T), (2b)^(1/T)) = {worst:.4} > 1/4"
            )));
        }
        Ok(Self {
            t,
            alpha_prime: alpha.powf(1.0 / tf),
            delta_prime: None,
            beta_prime: Some(beta.powf(1.0 / tf)),
            direction: Direction::SuccessAmplification,
        })
    }
}

/// The canonical Bayesian self-reduction for `δ ∈ (α², α/8)`: `T = ⌊ln(α/δ)/ln 8⌋`.
pub fn plan_self_reduction(alpha: f64, delta: f64) -> Result<ReductionPlan> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1/2]")));
    }
    if !(delta > alpha * alpha && delta < alpha / 8.0) {
        return Err(Error::domain(format!(
            "delta = {delta} outside (alpha^2, alpha/8) = ({}, {})",
            alpha * alpha,
            alpha / 8.0
        )));
    }
    let t = ((alpha / delta).ln() / 8f64.ln()).floor() as u32;
    let plan = ReductionPlan::bayesian(alpha, delta, t)?;
    let r = plan.delta_prime.unwrap() / plan.alpha_prime;
    if !((1.0 / 64.0) * (1.0 - SLACK)..=0.125 * (1.0 + SLACK)).contains(&r) {
        return Err(Error::domain(format!("delta'/alpha' = {r} outside [1/64, 1/8]")));
    }
    Ok(plan)
}

// ---------------------------------------------------------------------------
// Boosting by majority vote.

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostBound {
    /// `τ^{T/32}`.
    pub bound: f64,
    /// `P(Bin(T, τ) ≥ T/2)`, the exact probability that the majority fails.
    pub exact_tail: f64,
}

/// `P(Bin(T, τ) ≥ k)`.
pub fn binomial_upper_tail(t: u32, tau: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > t {
        return 0.0;
    }
    if tau <= 0.0 {
        return 0.0;
    }
    if tau >= 1.0 {
        return 1.0;
    }
    let lnf = ln_factorial_table(t as usize);
    let (lt, lf) = (tau.ln(), (-tau).ln_1p());
    ksum((k..=t).map(|j| {
        let (j, t) = (j as usize, t as usize);
        (lnf[t] - lnf[j] - lnf[t - j] + j as f64 * lt + (t - j) as f64 * lf).exp()
    }))
}

/// Smallest number of failing buckets that makes the majority fail (ties fail).
pub fn majority_failure_threshold(t: u32) -> u32 {
    t.div_ceil(2)
}

/// Bound on the failure probability of a `T`-fold majority vote of a test failing w.p. `τ`.
pub fn boost_error_bound(tau: f64, t: u32) -> Result<BoostBound> {
    if !(0.0..=0.25).contains(&tau) {
        return Err(Error::domain(format!("tau = {tau} exceeds 1/4")));
    }
    if t == 0 {
        return Err(Error::domain("T must be at least 1"));
    }
    Ok(BoostBound {
        bound: tau.powf(t as f64 / 32.0),
        exact_tail: binomial_upper_tail(t, tau, majority_failure_threshold(t)),
    })
}

/// Exact check of `P(Bin(T, a/b) ≥ T/2) ≤ (a/b)^{T/32}` in integer arithmetic.
///
/// Writing the tail as `N / b^T`, the claim is `N^32 ≤ a^T b^{31 T}`.
pub fn boost_bound_holds_exact(a: u64, b: u64, t: u32) -> bool {
    assert!(a <= b && b > 0);
    let ab = BigUint::from(a);
    let cb = BigUint::from(b - a);
    let mut num = BigUint::zero();
    let mut binom = BigUint::one();
    // Accumulate C(T,k) a^k (b-a)^{T-k} for k >= ceil(T/2).
    let kmin = majority_failure_threshold(t);
    for k in 0..=t {
        if k >= kmin {
            num += &binom * ab.pow(k) * cb.pow(t - k);
        }
        binom = binom * BigUint::from(t - k) / BigUint::from(k + 1);
    }
    let lhs = num.pow(32);
    let rhs = ab.pow(t) * BigUint::from(b).pow(31 * t);
    lhs <= rhs
}

// ---------------------------------------------------------------------------
// Oracle-backed verifications.

fn finite_or_cap(n: NStar, what: &'static str, cap: u64) -> Result<u64> {
    n.finite().ok_or(Error::Capacity {
        what,
        needed: cap as u128 + 1,
        limit: cap as u128,
    })
}

fn pf_exact(p: &Distribution, q: &Distribution, a: f64, b: f64, cap: u64) -> Result<u64> {
    if a >= 1.0 || b >= 1.0 || a + b >= 1.0 {
        return Ok(0);
    }
    let inst = TestingInstance::prior_free(p.clone(), q.clone(), a, b)?;
    finite_or_cap(n_star_pf_exact(&inst, cap)?, "prior-free n* search", cap)
}

fn bayes_exact(p: &Distribution, q: &Distribution, prior: f64, delta: f64, cap: u64) -> Result<u64> {
    let inst = TestingInstance::bayesian(p.clone(), q.clone(), prior, delta)?;
    finite_or_cap(n_star_bayes_exact(&inst, cap)?, "Bayesian n* search", cap)
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorAmplification {
    pub t: u32,
    /// `n*_PF(α, β)`.
    pub lhs: Option<u64>,
    /// `T (n*_PF((2α)^{1/T}, (2β)^{1/T}) − 1)`.
    pub rhs: Option<i64>,
    pub holds: bool,
    pub skipped: Option<String>,
}

/// Checks `n*_PF(α, β) ≥ T (n*_PF((2α)^{1/T}, (2β)^{1/T}) − 1)` with the exact oracle.
pub fn verify_error_amplification(
    p: &Distribution,
    q: &Distribution,
    alpha: f64,
    beta: f64,
    t: u32,
    n_cap: u64,
) -> Result<ErrorAmplification> {
    if t == 0 {
        return Err(Error::domain("T must be at least 1"));
    }
    let tf = t as f64;
    let a2 = (2.0 * alpha).powf(1.0 / tf);
    let b2 = (2.0 * beta).powf(1.0 / tf);
    if a2.max(b2) > 0.25 {
        return Ok(ErrorAmplification {
            t,
            lhs: None,
            rhs: None,
            holds: true,
            skipped: Some(format!(
                "max((2a)^(1/T), (2b)^(1/T)) = {:.4} > 1/4: outside the reduction's hypothesis",
                a2.max(b2)
            )),
        });
    }
    let lhs = pf_exact(p, q, alpha, beta, n_cap)?;
    let inner = pf_exact(p, q, a2, b2, n_cap)?;
    let rhs = t as i64 * (inner as i64 - 1);
    Ok(ErrorAmplification {
        t,
        lhs: Some(lhs),
        rhs: Some(rhs),
        holds: lhs as i64 >= rhs,
        skipped: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuccessAmplification {
    pub t: u32,
    /// `n*_PF(α, β)`.
    pub lhs: u64,
    /// `n*_PF(α^{1/T}, β^{1/T})`.
    pub rhs: u64,
    /// `lhs / (T · rhs)`.
    pub ratio: f64,
}

/// Reports `n*_PF(α, β) / (T · n*_PF(α^{1/T}, β^{1/T}))`.
pub fn verify_success_amplification(
    p: &Distribution,
    q: &Distribution,
    alpha: f64,
    beta: f64,
    t: u32,
    n_cap: u64,
) -> Result<SuccessAmplification> {
    if t == 0 {
        return Err(Error::domain("T must be at least 1"));
    }
    let tf = t as f64;
    let (a1, b1) = (alpha.powf(1.0 / tf), beta.powf(1.0 / tf));
    if a1.max(b1) > 0.25 {
        return Err(Error::domain(format!(
            "max(a^(1/T), b^(1/T)) = {:.4} > 1/4",
            a1.max(b1)
        )));
    }
    let lhs = pf_exact(p, q, alpha, beta, n_cap)?;
    let rhs = pf_exact(p, q, a1, b1, n_cap)?;
    Ok(SuccessAmplification {
        t,
        lhs,
        rhs,
        ratio: lhs as f64 / (tf * rhs as f64),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PfBayesSandwich {
    /// `n*_B(β/(α+β), 2αβ/(α+β))`.
    pub bayes_lower: u64,
    pub prior_free: u64,
    /// `n*_B(β/(α+β), αβ/(α+β))`.
    pub bayes_upper: u64,
    pub holds: bool,
    /// `prior_free / bayes_upper`, the empirical constant of the equivalence.
    pub ratio: f64,
}

/// Compares `n*_PF(α, β)` with the two Bayesian problems that sandwich it.
pub fn pf_bayes_sandwich(
    p: &Distribution,
    q: &Distribution,
    alpha: f64,
    beta: f64,
    n_cap: u64,
) -> Result<PfBayesSandwich> {
    let s = alpha + beta;
    let prior = beta / s;
    let lo = bayes_exact(p, q, prior, 2.0 * alpha * beta / s, n_cap)?;
    let hi = bayes_exact(p, q, prior, alpha * beta / s, n_cap)?;
    let pf = pf_exact(p, q, alpha, beta, n_cap)?;
    Ok(PfBayesSandwich {
        bayes_lower: lo,
        prior_free: pf,
        bayes_upper: hi,
        holds: lo <= pf && pf <= hi,
        ratio: if hi == 0 { 1.0 } else { pf as f64 / hi as f64 },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityRatio {
    pub n1: u64,
    pub n2: u64,
    /// `n1 / n2`.
    pub ratio: f64,
    /// `max(1, ln(α₁/δ₁)/ln(α₂/δ₂), ln(1/δ₁)/ln(1/δ₂))`.
    pub bound: f64,
    /// `ratio / bound`; bounded by a universal constant if the stability claim holds.
    pub constant: f64,
}

/// Empirical constant for how `n*_B` changes between two `(α, δ)` settings.
pub fn mild_change_ratio(
    p: &Distribution,
    q: &Distribution,
    (alpha1, delta1): (f64, f64),
    (alpha2, delta2): (f64, f64),
    n_cap: u64,
) -> Result<StabilityRatio> {
    for (a, d) in [(alpha1, delta1), (alpha2, delta2)] {
        if !(a > 0.0 && a <= 0.5 && d > 0.0 && d < a / 4.0) {
            return Err(Error::domain(format!(
                "need delta in (0, alpha/4), alpha <= 1/2: ({a}, {d})"
            )));
        }
    }
    let n1 = bayes_exact(p, q, alpha1, delta1, n_cap)?;
    let n2 = bayes_exact(p, q, alpha2, delta2, n_cap)?;
    let bound = 1f64
        .max((alpha1 / delta1).ln() / (alpha2 / delta2).ln())
        .max(delta1.ln() / delta2.ln());
    let ratio = n1 as f64 / n2 as f64;
    Ok(StabilityRatio {
        n1,
        n2,
        ratio,
        bound,
        constant: ratio / bound,
    })
}
