//! Numerical evidence for the `JS_α` versus `H_{1−λ}` comparison inequality.
//!
//! The inequality
//!
//! ```text
//! JS_α(p, q) ≤ (32 e^{2λ ln(1/α)} α / λ) · H_{1−λ}(p, q)
//! ```
//!
//! is checked on dense Bernoulli grids, together with the derivative formulas
//! behind its proof, the pointwise second-derivative comparison, an auxiliary
//! scalar bound, and transfer to larger alphabets. Everything here is
//! floating-point grid evidence, not a certificate.
//!
//! Bernoulli pairs are described by their biases (mass on the symbol `1`).

use std::f64::consts::LN_2;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::Distribution;
use crate::divergences::{h_lambda_ber, h_lambda_slices, js_alpha_ber, js_alpha_slices, LambdaParam};
use crate::error::{Error, Result};
use crate::exact::{bayes_error_exact, n_star_bayes_exact, NStar, TestingInstance, DEFAULT_N_CAP};
use crate::formulas::gaussian_tv;
use crate::instances::{random_distribution, seeded_rng};
use crate::numeric::ols_slope;

/// Absolute tolerance for a grid violation.
pub const VIOLATION_TOL: f64 = 1e-12;

/// The `r` for which `λ = r/ln(1/α)` is the linear-regime choice.
pub const LINEAR_R: f64 = 0.5 * LN_2;

/// Constant `32 e^{2λ ln(1/α)} α / λ` in front of `H_{1−λ}`.
pub fn comparison_constant(alpha: f64, lambda: f64) -> f64 {
    32.0 * (2.0 * lambda * (1.0 / alpha).ln()).exp() * alpha / lambda
}

/// `α = 2^{-1}, …, 2^{-20}`.
pub fn default_alphas() -> Vec<f64> {
    (1..=20).map(|i| 0.5_f64.powi(i)).collect()
}

/// A Bernoulli pair with prior and exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliPair {
    pub p_bias: f64,
    pub q_bias: f64,
    pub alpha: f64,
    pub lam: LambdaParam,
}

impl BernoulliPair {
    pub fn new(p_bias: f64, q_bias: f64, alpha: f64, lam: LambdaParam) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_bias) || !(0.0..=1.0).contains(&q_bias) {
            return Err(Error::domain(format!("biases ({p_bias}, {q_bias}) outside [0, 1]")));
        }
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::domain(format!("alpha = {alpha} outside (0, 1/2]")));
        }
        if lam.lambda > 0.5 {
            return Err(Error::domain(format!("lambda = {} above 1/2", lam.lambda)));
        }
        Ok(Self {
            p_bias,
            q_bias,
            alpha,
            lam,
        })
    }

    /// Pair with the linear-regime exponent for `alpha`.
    pub fn linear(p_bias: f64, q_bias: f64, alpha: f64) -> Result<Self> {
        Self::new(p_bias, q_bias, alpha, LambdaParam::linear_for_prior(alpha)?)
    }

    /// Relabel both symbols so that `p_bias ≤ 1/2`. Both divergences are invariant.
    pub fn lower_half(self) -> Self {
        if self.p_bias > 0.5 {
            Self {
                p_bias: 1.0 - self.p_bias,
                q_bias: 1.0 - self.q_bias,
                ..self
            }
        } else {
            self
        }
    }

    pub fn js(&self) -> f64 {
        js_alpha_ber(self.p_bias, self.q_bias, self.alpha)
    }

    pub fn h_bar(&self) -> f64 {
        h_lambda_ber(self.p_bias, self.q_bias, self.lam.bar())
    }

    pub fn rhs(&self) -> f64 {
        comparison_constant(self.alpha, self.lam.lambda) * self.h_bar()
    }
}

// ---------------------------------------------------------------------------
// Analytic derivatives in q.
//
// With d = p − q the mixtures are m1 = αp + ᾱq = q + αd and
// m0 = αp̄ + ᾱq̄ = q̄ − αd, which keeps every expression free of cancellation.

/// `d/dq JS_α(Ber(p), Ber(q)) = ᾱ ln((q/q̄)(m0/m1))`.
pub fn js_d1(p: f64, q: f64, alpha: f64) -> f64 {
    let d = p - q;
    (1.0 - alpha) * ((-alpha * d / (1.0 - q)).ln_1p() - (alpha * d / q).ln_1p())
}

/// `d²/dq² JS_α(Ber(p), Ber(q)) = αᾱ (p/(q m1) + p̄/(q̄ m0))`.
pub fn js_d2(p: f64, q: f64, alpha: f64) -> f64 {
    let ab = 1.0 - alpha;
    let m1 = alpha * p + ab * q;
    let m0 = alpha * (1.0 - p) + ab * (1.0 - q);
    let mut s = 0.0;
    if p > 0.0 {
        s += p / (q * m1);
    }
    if p < 1.0 {
        s += (1.0 - p) / ((1.0 - q) * m0);
    }
    alpha * ab * s
}

/// `d/dq H_{1−λ}(Ber(p), Ber(q)) = λ((p̄/q̄)^{1−λ} − (p/q)^{1−λ})`.
pub fn h_bar_d1(p: f64, q: f64, lambda: f64) -> f64 {
    let lb = 1.0 - lambda;
    lambda * ((lb * ((1.0 - p) / (1.0 - q)).ln()).exp_m1() - (lb * (p / q).ln()).exp_m1())
}

/// `d²/dq² H_{1−λ}(Ber(p), Ber(q)) = λ(1−λ)((p/q)^{1−λ}/q + (p̄/q̄)^{1−λ}/q̄)`.
pub fn h_bar_d2(p: f64, q: f64, lambda: f64) -> f64 {
    let lb = 1.0 - lambda;
    lambda * lb * ((p / q).powf(lb) / q + ((1.0 - p) / (1.0 - q)).powf(lb) / (1.0 - q))
}

// ---------------------------------------------------------------------------
// Grid check of the comparison inequality.

/// Bias grid: `uniform` evenly spaced points on `[0, 1]` plus `corners`
/// log-spaced points in `[corner_min, corner_max]` and their mirrors near 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub uniform: usize,
    pub corners: usize,
    pub corner_min: f64,
    pub corner_max: f64,
    pub alphas: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            uniform: 400,
            corners: 40,
            corner_min: 1e-12,
            corner_max: 1e-2,
            alphas: default_alphas(),
        }
    }
}

/// Log-spaced values `lo, …, hi` (inclusive).
pub fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

impl GridSpec {
    pub fn biases(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        if self.uniform == 1 {
            v.push(0.5);
        } else {
            v.extend((0..self.uniform).map(|i| i as f64 / (self.uniform - 1) as f64));
        }
        for c in log_grid(self.corners, self.corner_min, self.corner_max) {
            v.push(c);
            v.push(1.0 - c);
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn point_count(&self) -> usize {
        let b = self.biases().len();
        b * b * self.alphas.len()
    }
}

/// Location of the largest observed `LHS/RHS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub points: u64,
    pub alphas: usize,
    pub tolerance: f64,
    pub violations: u64,
    /// Largest `LHS − RHS` (negative when every point has slack).
    pub max_violation: f64,
    pub max_ratio: f64,
    pub worst: Option<GridPoint>,
    pub ceil_chain_checked: u64,
    pub ceil_chain_violations: u64,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.ceil_chain_violations == 0
    }

    fn empty(tolerance: f64) -> Self {
        Self {
            points: 0,
            alphas: 0,
            tolerance,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
            max_ratio: 0.0,
            worst: None,
            ceil_chain_checked: 0,
            ceil_chain_violations: 0,
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.points += o.points;
        self.violations += o.violations;
        self.max_violation = self.max_violation.max(o.max_violation);
        if o.max_ratio > self.max_ratio {
            self.max_ratio = o.max_ratio;
            self.worst = o.worst;
        }
        self.ceil_chain_checked += o.ceil_chain_checked;
        self.ceil_chain_violations += o.ceil_chain_violations;
        self
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "JS/H grid: {} points over {} alphas, {} violations (max LHS-RHS {:.3e}), max ratio {:.6}, ceil chain {}/{} ok",
            self.points,
            self.alphas,
            self.violations,
            self.max_violation,
            self.max_ratio,
            self.ceil_chain_checked - self.ceil_chain_violations,
            self.ceil_chain_checked
        )
    }
}

/// Evaluates the comparison inequality at `λ = 0.5 ln 2 / ln(1/α)` on every
/// grid pair, and the rounded chain `⌈2/H_{1−λ}⌉ ≤ ⌈(256/ln 2) α ln(1/α)/JS_α⌉`
/// wherever both sides are finite.
pub fn check_js_h_inequality(grid: &GridSpec) -> Result<InequalityReport> {
    for &a in &grid.alphas {
        if !(a > 0.0 && a <= 0.5) {
            return Err(Error::domain(format!("alpha = {a} outside (0, 1/2]")));
        }
    }
    let biases = grid.biases();
    let jobs: Vec<(f64, f64)> = grid
        .alphas
        .iter()
        .flat_map(|&a| biases.iter().map(move |&p| (a, p)))
        .collect();
    let mut report = jobs
        .par_iter()
        .map(|&(alpha, p)| {
            let lambda = LINEAR_R / (1.0 / alpha).ln();
            let c = comparison_constant(alpha, lambda);
            let chain_c = 256.0 / LN_2 * alpha * (1.0 / alpha).ln();
            let mut r = InequalityReport::empty(VIOLATION_TOL);
            for &q in &biases {
                let js = js_alpha_ber(p, q, alpha);
                let hb = h_lambda_ber(p, q, 1.0 - lambda);
                let rhs = c * hb;
                r.points += 1;
                let gap = js - rhs;
                r.max_violation = r.max_violation.max(gap);
                if gap > VIOLATION_TOL {
                    r.violations += 1;
                }
                if rhs > 0.0 {
                    let ratio = js / rhs;
                    if ratio > r.max_ratio {
                        r.max_ratio = ratio;
                        r.worst = Some(GridPoint { p, q, alpha, ratio });
                    }
                }
                if hb > 0.0 && js > 0.0 {
                    r.ceil_chain_checked += 1;
                    if (2.0 / hb).ceil() > (chain_c / js).ceil() {
                        r.ceil_chain_violations += 1;
                    }
                }
            }
            r
        })
        .reduce(|| InequalityReport::empty(VIOLATION_TOL), InequalityReport::merge);
    report.alphas = grid.alphas.len();
    Ok(report)
}

// ---------------------------------------------------------------------------
// Derivative formulas against finite differences.

/// Analytic value, finite-difference value and relative discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeComparison {
    pub analytic: f64,
    pub finite_difference: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub pair: BernoulliPair,
    pub step: f64,
    pub js_first: DerivativeComparison,
    pub js_second: DerivativeComparison,
    pub h_first: DerivativeComparison,
    pub h_second: DerivativeComparison,
}

impl DerivativeReport {
    pub fn max_rel_error(&self) -> f64 {
        [self.js_first, self.js_second, self.h_first, self.h_second]
            .iter()
            .map(|c| c.rel_error)
            .fold(0.0, f64::max)
    }
}

/// Central difference at steps `h` and `h/2`, combined by Richardson
/// extrapolation so the truncation error is fourth order.
fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |s: f64| (f(x + s) - f(x - s)) / (2.0 * s);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

fn compare(analytic: f64, fd: f64, floor: f64) -> DerivativeComparison {
    let scale = analytic.abs().max(fd.abs()).max(floor);
    let rel_error = if scale == 0.0 {
        0.0
    } else {
        (analytic - fd).abs() / scale
    };
    DerivativeComparison {
        analytic,
        finite_difference: fd,
        rel_error,
    }
}

/// Compares the analytic first and second `q`-derivatives of `JS_α` and
/// `H_{1−λ}` with central differences.
///
/// First derivatives are differenced from the divergence values; second
/// derivatives from the (already checked) first-derivative formulas. First
/// derivatives vanish at `q = p`, so their relative error is measured against
/// at least `step · |second derivative|`.
pub fn derivative_check(pair: &BernoulliPair, step: f64) -> Result<DerivativeReport> {
    let (p, q, a, l) = (pair.p_bias, pair.q_bias, pair.alpha, pair.lam.lambda);
    if !(step > 0.0 && q - step > 0.0 && q + step < 1.0) {
        return Err(Error::domain(format!(
            "q = {q} too close to the boundary for step {step}"
        )));
    }
    let js2 = js_d2(p, q, a);
    let h2 = h_bar_d2(p, q, l);
    Ok(DerivativeReport {
        pair: *pair,
        step,
        js_first: compare(
            js_d1(p, q, a),
            central_diff(|x| js_alpha_ber(p, x, a), q, step),
            step * js2,
        ),
        js_second: compare(js2, central_diff(|x| js_d1(p, x, a), q, step), 0.0),
        h_first: compare(
            h_bar_d1(p, q, l),
            central_diff(|x| h_lambda_ber(p, x, 1.0 - l), q, step),
            step * h2,
        ),
        h_second: compare(h2, central_diff(|x| h_bar_d1(p, x, l), q, step), 0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeSweepReport {
    pub points: usize,
    pub step: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub max_rel_error: f64,
    pub worst: Option<DerivativeReport>,
    /// Largest `|d/dq|` of either divergence at `q = p` over the sampled `p`.
    pub max_abs_first_derivative_at_p: f64,
}

impl fmt::Display for DerivativeSweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "derivatives: {} points, {} failures at rel tol {:.0e}, max rel error {:.3e}, max |d1| at q=p {:.3e}",
            self.points, self.failures, self.tolerance, self.max_rel_error, self.max_abs_first_derivative_at_p
        )
    }
}

/// Random interior points: `p ∈ [0, 1]`, `q ∈ [0.01, 0.99]`, `α` log-uniform
/// in `[2^{-20}, 1/2]`, linear-regime `λ`.
pub fn derivative_sweep(points: usize, seed: u64, step: f64, tolerance: f64) -> Result<DerivativeSweepReport> {
    let mut rng = seeded_rng(seed);
    let mut pairs = Vec::with_capacity(points);
    for _ in 0..points {
        let p = rng.random::<f64>();
        let q = 0.01 + 0.98 * rng.random::<f64>();
        let alpha = 0.5 * 2f64.powf(-19.0 * rng.random::<f64>());
        pairs.push(BernoulliPair::linear(p, q, alpha)?);
    }
    let reports: Vec<DerivativeReport> = pairs
        .par_iter()
        .map(|pr| derivative_check(pr, step))
        .collect::<Result<_>>()?;
    let failures = reports.iter().filter(|r| r.max_rel_error() > tolerance).count();
    let worst = reports
        .iter()
        .copied()
        .max_by(|a, b| a.max_rel_error().total_cmp(&b.max_rel_error()));
    let at_p = pairs
        .iter()
        .filter(|pr| pr.p_bias > 0.0 && pr.p_bias < 1.0)
        .map(|pr| {
            js_d1(pr.p_bias, pr.p_bias, pr.alpha)
                .abs()
                .max(h_bar_d1(pr.p_bias, pr.p_bias, pr.lam.lambda).abs())
        })
        .fold(0.0, f64::max);
    Ok(DerivativeSweepReport {
        points,
        step,
        tolerance,
        failures,
        max_rel_error: worst.map_or(0.0, |w| w.max_rel_error()),
        worst,
        max_abs_first_derivative_at_p: at_p,
    })
}

// ---------------------------------------------------------------------------
// Second-derivative comparison by region.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianGrid {
    pub p_points: usize,
    pub q_points: usize,
    pub alphas: Vec<f64>,
    pub r: f64,
}

impl Default for HessianGrid {
    fn default() -> Self {
        Self {
            p_points: 101,
            q_points: 400,
            alphas: default_alphas(),
            r: LINEAR_R,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub region: &'static str,
    pub points: u64,
    pub violations: u64,
    pub max_ratio: f64,
    /// Smallest `1 − LHS/RHS` seen in the region.
    pub worst_slack: f64,
    pub worst: Option<GridPoint>,
}

impl RegionReport {
    fn new(region: &'static str) -> Self {
        Self {
            region,
            points: 0,
            violations: 0,
            max_ratio: 0.0,
            worst_slack: 1.0,
            worst: None,
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.points += o.points;
        self.violations += o.violations;
        if o.max_ratio > self.max_ratio {
            self.max_ratio = o.max_ratio;
            self.worst = o.worst;
        }
        self.worst_slack = self.worst_slack.min(o.worst_slack);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianReport {
    pub r: f64,
    pub regions: Vec<RegionReport>,
}

impl HessianReport {
    pub fn passed(&self) -> bool {
        self.regions.iter().all(|r| r.violations == 0)
    }
}

impl fmt::Display for HessianReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "second-derivative comparison (r = {:.4}):", self.r)?;
        for g in &self.regions {
            write!(
                f,
                "\n  {}: {} points, {} violations, max ratio {:.6}, worst slack {:.6}",
                g.region, g.points, g.violations, g.max_ratio, g.worst_slack
            )?;
        }
        Ok(())
    }
}

/// Right-hand side `(32 e^{2r} α / r) · d²/dq² (ln(1/α) H_{1−λ})`.
pub fn hessian_rhs(p: f64, q: f64, alpha: f64, r: f64) -> f64 {
    let la = (1.0 / alpha).ln();
    let lambda = r / la;
    32.0 * (2.0 * r).exp() * alpha / r * la * h_bar_d2(p, q, lambda)
}

const REGION_NAMES: [&str; 3] = ["q <= p <= 1/2", "q >= 1/2", "p <= q <= 1/2"];

/// Checks `d²JS_α ≤ (32 e^{2r} α/r) d²(ln(1/α) H_{1−λ})` for `p ∈ [0, 1/2]`,
/// `q ∈ (0, 1)`, with `λ = r/ln(1/α)`. Points on a region boundary count
/// toward every region containing them; `q = p` and `q = 1/2` are always on
/// the grid.
pub fn check_hessian_inequality(grid: &HessianGrid) -> Result<HessianReport> {
    for &a in &grid.alphas {
        if !(a > 0.0 && a <= 0.5) {
            return Err(Error::domain(format!("alpha = {a} outside (0, 1/2]")));
        }
        let lambda = grid.r / (1.0 / a).ln();
        if !(lambda > 0.0 && lambda <= 0.5 + 1e-15) {
            return Err(Error::domain(format!(
                "lambda = {lambda} outside (0, 1/2] at alpha = {a}"
            )));
        }
    }
    let mut ps: Vec<f64> = (0..grid.p_points.max(2))
        .map(|i| 0.5 * i as f64 / (grid.p_points.max(2) - 1) as f64)
        .collect();
    ps.extend(log_grid(12, 1e-12, 1e-3));
    let mut qs: Vec<f64> = (1..=grid.q_points)
        .map(|i| i as f64 / (grid.q_points + 1) as f64)
        .collect();
    for c in log_grid(12, 1e-12, 1e-3) {
        qs.push(c);
        qs.push(1.0 - c);
    }
    qs.push(0.5);
    let jobs: Vec<(f64, f64)> = grid
        .alphas
        .iter()
        .flat_map(|&a| ps.iter().map(move |&p| (a, p)))
        .collect();
    let r = grid.r;
    let empty = || REGION_NAMES.map(RegionReport::new);
    let regions = jobs
        .par_iter()
        .map(|&(alpha, p)| {
            let mut acc = empty();
            let mut eval = |q: f64| {
                let lhs = js_d2(p, q, alpha);
                let rhs = hessian_rhs(p, q, alpha, r);
                let ratio = lhs / rhs;
                let member = [q <= p, q >= 0.5, p <= q && q <= 0.5];
                for (g, inside) in acc.iter_mut().zip(member) {
                    if !inside {
                        continue;
                    }
                    g.points += 1;
                    if lhs - rhs > VIOLATION_TOL * rhs.max(1.0) {
                        g.violations += 1;
                    }
                    if ratio > g.max_ratio {
                        g.max_ratio = ratio;
                        g.worst = Some(GridPoint { p, q, alpha, ratio });
                    }
                    g.worst_slack = g.worst_slack.min(1.0 - ratio);
                }
            };
            for &q in &qs {
                eval(q);
            }
            if p > 0.0 {
                eval(p);
            }
            acc
        })
        .reduce(empty, |a, b| {
            let [a0, a1, a2] = a;
            let [b0, b1, b2] = b;
            [a0.merge(b0), a1.merge(b1), a2.merge(b2)]
        });
    Ok(HessianReport {
        r,
        regions: regions.to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Convexity of 32 h − j.

/// Absolute noise of the divergences at `q ≈ p`, where rounding of the
/// mixture leaves a residue of order `ε²`.
const ROUNDING_FLOOR: f64 = 16.0 * f64::EPSILON * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub constant: f64,
    pub triples: u64,
    pub convexity_violations: u64,
    pub negativity_violations: u64,
    /// Smallest second difference divided by its rounding scale.
    pub min_scaled_second_difference: f64,
    pub min_value: f64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.convexity_violations == 0 && self.negativity_violations == 0
    }
}

/// Second differences of `g(q) = C·(α e^{2r}/λ) H_{1−λ} − JS_α` on a uniform
/// grid of `q_points` values in `[0, 1]`, for each `p` in `ps` and each `α`,
/// with `λ = r/ln(1/α)`.
pub fn check_convexity(ps: &[f64], alphas: &[f64], q_points: usize, constant: f64, r: f64) -> ConvexityReport {
    let jobs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| ps.iter().map(move |&p| (a, p))).collect();
    let n = q_points.max(3);
    let parts: Vec<ConvexityReport> = jobs
        .par_iter()
        .map(|&(alpha, p)| {
            let lambda = r / (1.0 / alpha).ln();
            let c = constant * alpha * (2.0 * r).exp() / lambda;
            let vals: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let q = i as f64 / (n - 1) as f64;
                    let a = c * h_lambda_ber(p, q, 1.0 - lambda);
                    let b = js_alpha_ber(p, q, alpha);
                    (a - b, a + b)
                })
                .collect();
            let mut rep = ConvexityReport {
                constant,
                triples: 0,
                convexity_violations: 0,
                negativity_violations: 0,
                min_scaled_second_difference: f64::INFINITY,
                min_value: f64::INFINITY,
            };
            for &(g, scale) in &vals {
                rep.min_value = rep.min_value.min(g);
                if g < -(64.0 * f64::EPSILON * scale + ROUNDING_FLOOR) {
                    rep.negativity_violations += 1;
                }
            }
            for w in vals.windows(3) {
                let sd = w[0].0 - 2.0 * w[1].0 + w[2].0;
                let scale = 64.0 * f64::EPSILON * (w[0].1 + 2.0 * w[1].1 + w[2].1) + ROUNDING_FLOOR;
                rep.triples += 1;
                rep.min_scaled_second_difference = rep.min_scaled_second_difference.min(sd / scale);
                if sd < -scale {
                    rep.convexity_violations += 1;
                }
            }
            rep
        })
        .collect();
    parts.into_iter().fold(
        ConvexityReport {
            constant,
            triples: 0,
            convexity_violations: 0,
            negativity_violations: 0,
            min_scaled_second_difference: f64::INFINITY,
            min_value: f64::INFINITY,
        },
        |mut a, b| {
            a.triples += b.triples;
            a.convexity_violations += b.convexity_violations;
            a.negativity_violations += b.negativity_violations;
            a.min_scaled_second_difference = a.min_scaled_second_difference.min(b.min_scaled_second_difference);
            a.min_value = a.min_value.min(b.min_value);
            a
        },
    )
}

// ---------------------------------------------------------------------------
// 1 + x/(1 + αx) ≤ e^{2r} (1 + x)^{1−λ*}.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearVsNearlyLinearReport {
    pub alpha: f64,
    pub lam_star: f64,
    pub r: f64,
    pub points: usize,
    pub violations: usize,
    /// Points where the case-split intermediate bound fails either link.
    pub branch_violations: usize,
    pub max_ratio: f64,
    /// `|branch(x ≤ 1/α) − branch(x > 1/α)|` evaluated at `x = 1/α`.
    pub branch_gap_at_split: f64,
}

fn nearly_linear_lhs(x: f64, alpha: f64) -> f64 {
    1.0 + x / (1.0 + alpha * x)
}

fn nearly_linear_rhs(x: f64, lam_star: f64, r: f64) -> f64 {
    (2.0 * r + (1.0 - lam_star) * x.ln_1p()).exp()
}

/// Intermediate bound from the two-case argument: `(1+x)^{1−λ*}(1+1/α)^{λ*}`
/// when `αx ≤ 1`, and `1 + 1/α` otherwise.
fn nearly_linear_branch(x: f64, alpha: f64, lam_star: f64, small: bool) -> f64 {
    let k = (1.0 / alpha).ln_1p();
    if small {
        ((1.0 - lam_star) * x.ln_1p() + lam_star * k).exp()
    } else {
        1.0 + 1.0 / alpha
    }
}

/// Checks the scalar bound on `x_grid` plus `x = 0` and `x = 1/α`.
pub fn check_linear_vs_nearly_linear(
    x_grid: &[f64],
    alpha: f64,
    lam_star: f64,
    r: f64,
) -> Result<LinearVsNearlyLinearReport> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1/2]")));
    }
    let lam_max = (r / (1.0 / alpha).ln()).min(0.5);
    if !(lam_star > 0.0 && lam_star <= lam_max * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("lambda* = {lam_star} outside (0, {lam_max}]")));
    }
    if let Some(x) = x_grid.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::domain(format!("x = {x} must be nonnegative")));
    }
    let split = 1.0 / alpha;
    let mut xs = x_grid.to_vec();
    xs.push(0.0);
    xs.push(split);
    let tol = 1e-12;
    let mut rep = LinearVsNearlyLinearReport {
        alpha,
        lam_star,
        r,
        points: xs.len(),
        violations: 0,
        branch_violations: 0,
        max_ratio: 0.0,
        branch_gap_at_split: (nearly_linear_branch(split, alpha, lam_star, true)
            - nearly_linear_branch(split, alpha, lam_star, false))
        .abs(),
    };
    for &x in &xs {
        let lhs = nearly_linear_lhs(x, alpha);
        let rhs = nearly_linear_rhs(x, lam_star, r);
        let mid = nearly_linear_branch(x, alpha, lam_star, alpha * x <= 1.0);
        rep.max_ratio = rep.max_ratio.max(lhs / rhs);
        if lhs > rhs * (1.0 + tol) {
            rep.violations += 1;
        }
        if lhs > mid * (1.0 + tol) || mid > rhs * (1.0 + tol) {
            rep.branch_violations += 1;
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Transfer to larger alphabets.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointRangeReport {
    pub instances: usize,
    pub evaluations: usize,
    pub violations: usize,
    pub max_ratio: f64,
    /// Coarsenings to two cells that increased either divergence.
    pub coarsening_increases: usize,
    pub coarsened_violations: usize,
}

impl JointRangeReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.coarsening_increases == 0 && self.coarsened_violations == 0
    }
}

/// Random pairs on `2..=k_max` symbols (some atoms zeroed), checked at every
/// `α` in `alphas` with the linear-regime `λ`. Each pair is also merged into
/// two random cells, which must not increase either divergence.
pub fn joint_range_transfer_check(
    instances: usize,
    k_max: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<JointRangeReport> {
    if k_max < 2 {
        return Err(Error::domain("k_max must be at least 2"));
    }
    let mut rng = seeded_rng(seed);
    let mut rep = JointRangeReport {
        instances,
        evaluations: 0,
        violations: 0,
        max_ratio: 0.0,
        coarsening_increases: 0,
        coarsened_violations: 0,
    };
    for _ in 0..instances {
        let k = rng.random_range(2..=k_max);
        let p = random_distribution(&mut rng, k, 0.15);
        let q = random_distribution(&mut rng, k, 0.15);
        let cell: Vec<usize> = (0..k).map(|_| rng.random_range(0..2)).collect();
        let pc = p.coarsen(&cell, 2)?;
        let qc = q.coarsen(&cell, 2)?;
        for &alpha in alphas {
            let lam = LambdaParam::linear_for_prior(alpha)?;
            let c = comparison_constant(alpha, lam.lambda);
            let eval = |a: &Distribution, b: &Distribution| {
                (
                    js_alpha_slices(a.probs(), b.probs(), alpha),
                    h_lambda_slices(a.probs(), b.probs(), lam.bar()),
                )
            };
            let (js, hb) = eval(&p, &q);
            let (jc, hc) = eval(&pc, &qc);
            rep.evaluations += 1;
            if js - c * hb > VIOLATION_TOL {
                rep.violations += 1;
            }
            if hb > 0.0 {
                rep.max_ratio = rep.max_ratio.max(js / (c * hb));
            }
            if jc > js + 1e-12 * (1.0 + js) || hc > hb + 1e-12 * (1.0 + hb) {
                rep.coarsening_increases += 1;
            }
            if jc - c * hc > VIOLATION_TOL {
                rep.coarsened_violations += 1;
            }
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Weak-detection examples.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub gammas: Vec<f64>,
    pub n_star: Vec<u64>,
    pub slope: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub within: bool,
}

fn fit(gammas: Vec<f64>, n_star: Vec<u64>, expected: f64, tolerance: f64) -> SlopeFit {
    let xs: Vec<f64> = gammas.iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = n_star.iter().map(|&n| (n as f64).ln()).collect();
    let slope = ols_slope(&xs, &ys);
    SlopeFit {
        within: (slope - expected).abs() <= tolerance,
        gammas,
        n_star,
        slope,
        expected,
        tolerance,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormPoint {
    pub alpha: f64,
    pub gamma: f64,
    pub eps: f64,
    pub oracle: NStar,
    pub closed_form: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakDetectionReport {
    pub gaussian_separation: f64,
    pub gaussian: SlopeFit,
    pub bernoulli_eps: f64,
    pub bernoulli: SlopeFit,
    /// Largest `|TV_oracle − (1 − (1−ε)^n)|` over the probed `n`.
    pub bernoulli_tv_max_error: f64,
    pub closed_form: Vec<ClosedFormPoint>,
}

impl WeakDetectionReport {
    pub fn passed(&self) -> bool {
        self.gaussian.within
            && self.bernoulli.within
            && self.bernoulli_tv_max_error <= 1e-12
            && self.closed_form.iter().all(|c| c.matches)
    }
}

impl fmt::Display for WeakDetectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.closed_form.iter().filter(|c| c.matches).count();
        write!(
            f,
            "weak detection: gaussian slope {:.4}, bernoulli slope {:.4}, TV identity error {:.2e}, closed form {}/{}",
            self.gaussian.slope,
            self.bernoulli.slope,
            self.bernoulli_tv_max_error,
            ok,
            self.closed_form.len()
        )
    }
}

/// Smallest `n ≥ 1` with `ok(n)`, for `ok` monotone in `n`.
fn first_true<F: Fn(u64) -> bool>(ok: F) -> u64 {
    let mut hi = 1u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `γ = 2^{-10}, 2^{-9.5}, …, 2^{-4}`.
pub fn weak_detection_gammas() -> Vec<f64> {
    (0..=12).map(|i| 2f64.powf(-10.0 + 0.5 * i as f64)).collect()
}

/// `⌈ln(ᾱ/(αγ̄)) / ln(1/(1−ε))⌉`, the exact `n*` for `Ber(0)` versus `Ber(ε)`.
pub fn ber_zero_closed_form(alpha: f64, gamma: f64, eps: f64) -> u64 {
    let num = ((1.0 - alpha) / (alpha * (1.0 - gamma))).ln();
    (num / -(-eps).ln_1p()).ceil().max(0.0) as u64
}

/// Runs the three weak-detection examples at the uniform prior (Gaussian and
/// `Ber(1)`/`Ber(1−ε)` slopes) and for `Ber(0)`/`Ber(ε)` (closed form versus
/// the exact oracle on 20 `(α, γ)` points).
pub fn weak_detection_examples() -> Result<WeakDetectionReport> {
    let gammas = weak_detection_gammas();

    let sep = 2e-4;
    let gauss: Vec<u64> = gammas
        .iter()
        .map(|&g| first_true(|n| gaussian_tv(0.5 * sep, -0.5 * sep, n) >= g))
        .collect();

    let eps_b = 1e-5;
    let p1 = Distribution::bernoulli(1.0)?;
    let q1 = Distribution::bernoulli(1.0 - eps_b)?;
    let bern = gammas
        .par_iter()
        .map(|&g| {
            let inst = TestingInstance::bayesian(p1.clone(), q1.clone(), 0.5, 0.5 * (1.0 - g))?;
            n_star_bayes_exact(&inst, DEFAULT_N_CAP)?
                .finite()
                .ok_or_else(|| Error::domain("weak-detection example exceeded the search cap"))
        })
        .collect::<Result<Vec<u64>>>()?;
    let mut tv_err: f64 = 0.0;
    for n in [1u64, 2, 10, 100, 1000] {
        let tv = 1.0 - 2.0 * bayes_error_exact(&p1, &q1, 0.5, n)?;
        let closed = -((n as f64) * (-eps_b).ln_1p()).exp_m1();
        tv_err = tv_err.max((tv - closed).abs());
    }

    let eps_c = 0.05;
    let p0 = Distribution::bernoulli(0.0)?;
    let q0 = Distribution::bernoulli(eps_c)?;
    let mut grid = Vec::new();
    for alpha in [0.5, 0.3, 0.1, 0.01, 0.001] {
        for gamma in [0.01, 0.03, 0.1, 0.2] {
            grid.push((alpha, gamma));
        }
    }
    let closed_form = grid
        .par_iter()
        .map(|&(alpha, gamma)| {
            let inst = TestingInstance::bayesian(p0.clone(), q0.clone(), alpha, alpha * (1.0 - gamma))?;
            let oracle = n_star_bayes_exact(&inst, DEFAULT_N_CAP)?;
            let closed = ber_zero_closed_form(alpha, gamma, eps_c);
            Ok(ClosedFormPoint {
                alpha,
                gamma,
                eps: eps_c,
                oracle,
                closed_form: closed,
                matches: oracle == NStar::Finite(closed),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(WeakDetectionReport {
        gaussian_separation: sep,
        gaussian: fit(gammas.clone(), gauss, 2.0, 0.05),
        bernoulli_eps: eps_b,
        bernoulli: fit(gammas, bern, 1.0, 0.05),
        bernoulli_tv_max_error: tv_err,
        closed_form,
    })
}
