//! Testing under communication, privacy and robustness constraints.
//!
//! Each sample passes through a channel before reaching the tester. The
//! tools here pick good deterministic quantizers, search tiny ε-LDP
//! mechanisms, and build least favorable pairs for TV contamination.

mod channel;
mod huber;
mod ldp;
mod quantizer;

pub use channel::{ldp_feasible, Channel, LDP_SLACK, ROW_TOL};
pub use huber::{huber_lfd, LfdPair, LFD_TV_TOL};
pub use ldp::{ldp_brute_optimize, LdpSolution, LDP_FINAL_STEP, LDP_GRID_STEPS, LDP_MAX_INPUTS};
pub use quantizer::{
    brute_force_quantizer, llr_order, optimal_quantizer_dp, quantizer_value, QuantizerSolution, BRUTE_FORCE_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::divergences::{h_lambda_term, js_alpha_term};
use crate::error::{Error, Result};
use crate::exact::{n_star_bayes_exact, NStar, TestingInstance};

/// Divergence maximized by a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    HLambda { lambda: f64 },
    JsAlpha { alpha: f64 },
}

impl Objective {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Objective::HLambda { lambda } if !(lambda > 0.0 && lambda < 1.0) => {
                Err(Error::domain(format!("lambda = {lambda} outside (0, 1)")))
            }
            Objective::JsAlpha { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    /// Contribution of one output symbol with masses `p`, `q`.
    #[inline]
    pub fn term(&self, p: f64, q: f64) -> f64 {
        match *self {
            Objective::HLambda { lambda } => h_lambda_term(p, q, lambda),
            Objective::JsAlpha { alpha } => js_alpha_term(p, q, alpha),
        }
    }

    pub fn value(&self, p: &[f64], q: &[f64]) -> f64 {
        p.iter().zip(q).map(|(&a, &b)| self.term(a, b)).sum()
    }
}

/// Exact complexity with and without a `D`-cell quantizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedReport {
    pub d: usize,
    pub objective: Objective,
    pub objective_value: f64,
    pub cells: Vec<usize>,
    pub n_star: u64,
    pub n_quantized: u64,
    /// `n_quantized / n_star`.
    pub ratio: f64,
    /// `max(1, ln(n*/α)/D)`.
    pub overhead: f64,
    /// `max(1, ln(n*)/D)`.
    pub overhead_sharp: f64,
    /// `ratio / overhead`: the constant this instance needs.
    pub fitted_constant: f64,
    pub fitted_constant_sharp: f64,
}

/// Compares `n*_B(p, q, α, δ)` with the exact complexity after the best
/// interval quantizer for `objective` at `D` cells.
pub fn constrained_complexity_check(
    p: &Distribution,
    q: &Distribution,
    alpha: f64,
    delta: f64,
    d: usize,
    objective: &Objective,
    n_cap: u64,
) -> Result<ConstrainedReport> {
    let sol = optimal_quantizer_dp(p, q, d, objective)?;
    let pq = sol.channel.push_forward(p)?;
    let qq = sol.channel.push_forward(q)?;
    let finite = |n: NStar| match n {
        NStar::Finite(v) => Ok(v),
        NStar::ExceedsCap(cap) => Err(Error::Capacity {
            what: "sample-size search",
            needed: cap as u128 + 1,
            limit: cap as u128,
        }),
    };
    let n_star = finite(n_star_bayes_exact(
        &TestingInstance::bayesian(p.clone(), q.clone(), alpha, delta)?,
        n_cap,
    )?)?;
    let n_quantized = finite(n_star_bayes_exact(
        &TestingInstance::bayesian(pq, qq, alpha, delta)?,
        n_cap,
    )?)?;
    let ratio = if n_star == 0 {
        1.0
    } else {
        n_quantized as f64 / n_star as f64
    };
    let a = alpha.min(1.0 - alpha);
    let nf = n_star.max(1) as f64;
    let overhead = ((nf / a).ln() / d as f64).max(1.0);
    let overhead_sharp = (nf.ln() / d as f64).max(1.0);
    Ok(ConstrainedReport {
        d,
        objective: *objective,
        objective_value: sol.objective,
        cells: sol.cells,
        n_star,
        n_quantized,
        ratio,
        overhead,
        overhead_sharp,
        fitted_constant: ratio / overhead,
        fitted_constant_sharp: ratio / overhead_sharp,
    })
}
