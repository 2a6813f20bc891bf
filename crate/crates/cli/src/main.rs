//! `bht`: command-line front end for the sample-complexity toolkit.
//!
//! Every verb prints JSON on stdout (or CSV with `--format csv`). Errors go to
//! stderr as a JSON object `{"error": {"kind", "message"}}` with exit code 2
//! for bad input, 3 when an exact computation exceeds its capacity, 1 for I/O
//! failures and 4 when a verification ran but found violations.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use bht_core::constrained::{
    brute_force_quantizer, constrained_complexity_check, huber_lfd, ldp_brute_optimize, optimal_quantizer_dp, Objective,
};
use bht_core::divergences::{classic_divergences, e_gamma, h_lambda, js_alpha, mutual_info_binary, LambdaParam};
use bht_core::exact::{
    bayes_error_exact, n_star_bayes_exact, n_star_bayes_exact_traced, n_star_pf_exact_traced, TestingInstance,
    DEFAULT_N_CAP,
};
use bht_core::formulas::{n_star_bayes_estimate, n_star_pf_estimate, weak_detection_bounds};
use bht_core::inequality::{
    check_convexity, check_hessian_inequality, check_js_h_inequality, default_alphas, derivative_sweep,
    weak_detection_examples, GridSpec, HessianGrid, LINEAR_R,
};
use bht_core::reductions::{
    boost_error_bound, plan_self_reduction, verify_error_amplification, verify_success_amplification, ReductionPlan,
};
use bht_core::simulate::{simulate_boosted, simulate_lrt, SimConfig};
use bht_core::{Distribution, Error};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bht",
    version,
    about = "Sample complexity of simple binary hypothesis testing"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Verb {
    /// Divergences between two distributions.
    Divergence(DivergenceArgs),
    /// Exact sample complexity by oracle search, with the error trace.
    ExactN(ComplexityArgs),
    /// Formula-based estimate with certified bounds.
    EstimateN(ComplexityArgs),
    /// Bounds for error just below the trivial level.
    WeakDetect(WeakArgs),
    /// Grid verification of the JS / Hellinger comparison inequality.
    VerifyInequality(VerifyArgs),
    /// Self-reduction plans, amplification checks and boosting bounds.
    Reduce(ReduceArgs),
    /// Optimal deterministic quantizer onto D outputs.
    Quantize(QuantizeArgs),
    /// Approximate best epsilon-LDP channel onto two outputs.
    Ldp(LdpArgs),
    /// Least favorable pair in total-variation balls.
    RobustLfd(LfdArgs),
    /// Monte Carlo error of the likelihood-ratio test.
    Simulate(SimulateArgs),
    /// One row per point of a one-parameter grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct PairArgs {
    /// Distribution under the first hypothesis (JSON or .csv).
    #[arg(long)]
    p: PathBuf,
    /// Distribution under the second hypothesis (JSON or .csv).
    #[arg(long)]
    q: PathBuf,
}

impl PairArgs {
    fn load(&self) -> Result<(Distribution, Distribution), Error> {
        Ok((Distribution::load(&self.p)?, Distribution::load(&self.q)?))
    }
}

#[derive(Args)]
struct DivergenceArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Also report H_lambda, JS_alpha, E_gamma and the binary mutual information.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Args)]
struct ComplexityArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Prior on p (Bayesian problem).
    #[arg(long, requires = "delta", conflicts_with_all = ["alpha_t1", "beta_t2"])]
    alpha: Option<f64>,
    /// Target Bayes error.
    #[arg(long)]
    delta: Option<f64>,
    /// Type-I error target (prior-free problem).
    #[arg(long, requires = "beta_t2")]
    alpha_t1: Option<f64>,
    /// Type-II error target (prior-free problem).
    #[arg(long)]
    beta_t2: Option<f64>,
    /// Largest n the exact search may try.
    #[arg(long, default_value_t = DEFAULT_N_CAP)]
    cap: u64,
}

#[derive(Args)]
struct WeakArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    alpha: f64,
    /// Target error is alpha * (1 - gamma).
    #[arg(long)]
    gamma: f64,
    /// Also run the exact search.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_N_CAP)]
    cap: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Uniform bias points per axis.
    #[arg(long, default_value_t = 400)]
    grid: usize,
    /// Log-spaced bias points near each endpoint.
    #[arg(long, default_value_t = 40)]
    corners: usize,
    /// Smallest corner offset from 0 and 1.
    #[arg(long, default_value_t = 1e-12)]
    corner_min: f64,
    /// Number of priors 2^-1 .. 2^-m.
    #[arg(long, default_value_t = 20)]
    alphas: u32,
    /// Also run the derivative, Hessian, convexity and weak-detection checks.
    #[arg(long)]
    extra: bool,
    /// Random points for the derivative check.
    #[arg(long, default_value_t = 10_000)]
    derivative_points: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ReduceArgs {
    /// Prior, or type-I error with --beta.
    #[arg(long)]
    alpha: Option<f64>,
    /// Target Bayes error.
    #[arg(long)]
    delta: Option<f64>,
    /// Type-II error (prior-free).
    #[arg(long)]
    beta: Option<f64>,
    /// Number of buckets; chosen automatically for Bayesian plans when omitted.
    #[arg(long)]
    t: Option<u32>,
    /// Per-bucket error for the majority-vote bound.
    #[arg(long)]
    tau: Option<f64>,
    /// Distributions for the exact amplification checks (prior-free only).
    #[arg(long, requires = "q")]
    p: Option<PathBuf>,
    #[arg(long, requires = "p")]
    q: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_N_CAP)]
    cap: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveKind {
    HLambda,
    JsAlpha,
}

#[derive(Args)]
struct ObjectiveArgs {
    /// Divergence to maximize.
    #[arg(long, value_enum, default_value_t = ObjectiveKind::JsAlpha)]
    objective: ObjectiveKind,
    /// lambda for h-lambda, alpha for js-alpha.
    #[arg(long, default_value_t = 0.5)]
    param: f64,
}

impl ObjectiveArgs {
    fn objective(&self) -> Objective {
        match self.objective {
            ObjectiveKind::HLambda => Objective::HLambda { lambda: self.param },
            ObjectiveKind::JsAlpha => Objective::JsAlpha { alpha: self.param },
        }
    }
}

#[derive(Args)]
struct QuantizeArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Output alphabet size.
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    objective: ObjectiveArgs,
    /// Cross-check against exhaustive search.
    #[arg(long)]
    brute: bool,
    /// Prior for the sample-complexity comparison (needs --delta).
    #[arg(long, requires = "delta")]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_CAP)]
    cap: u64,
}

#[derive(Args)]
struct LdpArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Privacy level.
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[command(flatten)]
    objective: ObjectiveArgs,
}

#[derive(Args)]
struct LfdArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Contamination radius in total variation.
    #[arg(long)]
    epsilon: f64,
    /// Prior for the robust complexity comparison (needs --delta).
    #[arg(long, requires = "delta")]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_CAP)]
    cap: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    alpha: f64,
    /// Samples per test (per bucket with --buckets).
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Log-likelihood-ratio threshold; defaults to ln((1-alpha)/alpha).
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<f64>,
    /// Majority vote over this many independent tests.
    #[arg(long)]
    buckets: Option<u32>,
    /// Also report the exact error (plain test only).
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Quantity {
    BayesError,
    ExactN,
    EstimateN,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SweepParam {
    Alpha,
    Delta,
    N,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// What to compute at each point.
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Parameter that varies along the grid.
    #[arg(long, value_enum)]
    vary: SweepParam,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Geometric instead of arithmetic spacing.
    #[arg(long)]
    log: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, conflicts_with = "delta_ratio")]
    delta: Option<f64>,
    /// Target error as a fraction of the prior.
    #[arg(long)]
    delta_ratio: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_N_CAP)]
    cap: u64,
}

/// A verb's result: a JSON document, or a table for sweeps.
enum Output {
    Doc {
        value: Value,
        ok: bool,
    },
    Table {
        columns: Vec<&'static str>,
        rows: Vec<Vec<Value>>,
    },
}

fn doc(value: Value) -> Output {
    Output::Doc { value, ok: true }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            emit_error("usage", msg.trim());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    if let Some(n) = std::env::var("HT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli.verb).and_then(|out| print(&out, cli.format).map(|_| out)) {
        Ok(Output::Doc { ok: false, .. }) => ExitCode::from(EXIT_VIOLATION),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            emit_error(e.kind(), &e.to_string());
            ExitCode::from(match e {
                Error::Capacity { .. } => EXIT_CAPACITY,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_INPUT,
            })
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    let v = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{v}");
}

fn run(verb: Verb) -> Result<Output, Error> {
    match verb {
        Verb::Divergence(a) => divergence(a),
        Verb::ExactN(a) => exact_n(a),
        Verb::EstimateN(a) => estimate_n(a),
        Verb::WeakDetect(a) => weak_detect(a),
        Verb::VerifyInequality(a) => verify_inequality(a),
        Verb::Reduce(a) => reduce(a),
        Verb::Quantize(a) => quantize(a),
        Verb::Ldp(a) => ldp(a),
        Verb::RobustLfd(a) => robust_lfd(a),
        Verb::Simulate(a) => simulate(a),
        Verb::Sweep(a) => sweep(a),
    }
}

fn divergence(a: DivergenceArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let classic = classic_divergences(&p, &q)?;
    let mut v = to_value(&classic);
    if a.all {
        let m = v.as_object_mut().expect("object");
        m.insert(
            "h_lambda".into(),
            json!({ "lambda": a.lambda, "value": h_lambda(&p, &q, LambdaParam::new(a.lambda)?)? }),
        );
        m.insert(
            "js_alpha".into(),
            json!({ "alpha": a.alpha, "value": js_alpha(&p, &q, a.alpha)? }),
        );
        m.insert(
            "e_gamma".into(),
            json!({ "gamma": a.gamma, "value": e_gamma(&p, &q, a.gamma)? }),
        );
        m.insert(
            "mutual_info_binary".into(),
            json!({ "alpha": a.alpha, "value": mutual_info_binary(&p, &q, a.alpha)? }),
        );
    }
    Ok(doc(v))
}

enum Problem {
    Bayes { alpha: f64, delta: f64 },
    PriorFree { alpha_t1: f64, beta_t2: f64 },
}

fn problem(a: &ComplexityArgs) -> Result<Problem, Error> {
    match (a.alpha, a.delta, a.alpha_t1, a.beta_t2) {
        (Some(alpha), Some(delta), None, None) => Ok(Problem::Bayes { alpha, delta }),
        (None, None, Some(alpha_t1), Some(beta_t2)) => Ok(Problem::PriorFree { alpha_t1, beta_t2 }),
        _ => Err(Error::Structural(
            "give either --alpha and --delta, or --alpha-t1 and --beta-t2".into(),
        )),
    }
}

fn exact_n(a: ComplexityArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let trace = match problem(&a)? {
        Problem::Bayes { alpha, delta } => {
            n_star_bayes_exact_traced(&TestingInstance::bayesian(p, q, alpha, delta)?, a.cap)?
        }
        Problem::PriorFree { alpha_t1, beta_t2 } => {
            n_star_pf_exact_traced(&TestingInstance::prior_free(p, q, alpha_t1, beta_t2)?, a.cap)?
        }
    };
    let mut v = to_value(&trace);
    v["cap"] = json!(a.cap);
    Ok(doc(v))
}

fn estimate_n(a: ComplexityArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let est = match problem(&a)? {
        Problem::Bayes { alpha, delta } => n_star_bayes_estimate(&p, &q, alpha, delta)?,
        Problem::PriorFree { alpha_t1, beta_t2 } => n_star_pf_estimate(&p, &q, alpha_t1, beta_t2)?,
    };
    Ok(doc(to_value(&est)))
}

fn weak_detect(a: WeakArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let est = weak_detection_bounds(&p, &q, a.alpha, a.gamma)?;
    let mut v = json!({ "alpha": a.alpha, "gamma": a.gamma, "estimate": to_value(&est) });
    if a.exact {
        let delta = a.alpha * (1.0 - a.gamma);
        let n = n_star_bayes_exact(&TestingInstance::bayesian(p, q, a.alpha, delta)?, a.cap)?;
        v["exact_n_star"] = to_value(&n);
    }
    Ok(doc(v))
}

fn verify_inequality(a: VerifyArgs) -> Result<Output, Error> {
    if a.grid < 2 || a.alphas == 0 {
        return Err(domain("need --grid >= 2 and --alphas >= 1"));
    }
    let alphas: Vec<f64> = default_alphas()
        .into_iter()
        .chain((21..).map(|i| 0.5f64.powi(i)))
        .take(a.alphas as usize)
        .collect();
    let grid = GridSpec {
        uniform: a.grid,
        corners: a.corners,
        corner_min: a.corner_min,
        alphas: alphas.clone(),
        ..GridSpec::default()
    };
    let rep = check_js_h_inequality(&grid)?;
    let mut ok = rep.passed();
    let mut v = json!({ "summary": rep.to_string(), "comparison": to_value(&rep) });
    if a.extra {
        let d = derivative_sweep(a.derivative_points, a.seed, 1e-5, 1e-6)?;
        let h = check_hessian_inequality(&HessianGrid {
            alphas: alphas.clone(),
            ..HessianGrid::default()
        })?;
        let ps: Vec<f64> = (0..=20).map(|i| i as f64 / 40.0).collect();
        let c = check_convexity(&ps, &alphas, 2001, 32.0, LINEAR_R);
        let w = weak_detection_examples()?;
        ok = ok && d.failures == 0 && h.passed() && c.passed() && w.passed();
        v["derivatives"] = to_value(&d);
        v["hessian"] = to_value(&h);
        v["convexity"] = to_value(&c);
        v["weak_detection"] = to_value(&w);
    }
    v["passed"] = json!(ok);
    Ok(Output::Doc { value: v, ok })
}

fn reduce(a: ReduceArgs) -> Result<Output, Error> {
    let mut v = Map::new();
    match (a.alpha, a.delta, a.beta) {
        (Some(alpha), Some(delta), None) => {
            let plan = match a.t {
                Some(t) => ReductionPlan::bayesian(alpha, delta, t)?,
                None => plan_self_reduction(alpha, delta)?,
            };
            v.insert("plan".into(), to_value(&plan));
        }
        (Some(alpha), None, Some(beta)) => {
            let t =
                a.t.ok_or_else(|| Error::Structural("prior-free plans need --t".into()))?;
            match ReductionPlan::prior_free(alpha, beta, t) {
                Ok(plan) => {
                    v.insert("plan".into(), to_value(&plan));
                }
                Err(e) => {
                    v.insert("plan_error".into(), json!(e.to_string()));
                }
            }
            if let (Some(pp), Some(qp)) = (&a.p, &a.q) {
                let (p, q) = (Distribution::load(pp)?, Distribution::load(qp)?);
                v.insert(
                    "error_amplification".into(),
                    to_value(&verify_error_amplification(&p, &q, alpha, beta, t, a.cap)?),
                );
                match verify_success_amplification(&p, &q, alpha, beta, t, a.cap) {
                    Ok(s) => v.insert("success_amplification".into(), to_value(&s)),
                    Err(e @ Error::Domain(_)) => v.insert("success_amplification_skipped".into(), json!(e.to_string())),
                    Err(e) => return Err(e),
                };
            }
        }
        (None, None, None) => {}
        _ => {
            return Err(Error::Structural(
                "give --alpha with --delta (Bayesian) or with --beta (prior-free)".into(),
            ))
        }
    }
    if let Some(tau) = a.tau {
        let t = a.t.ok_or_else(|| Error::Structural("--tau needs --t".into()))?;
        let b = boost_error_bound(tau, t)?;
        v.insert(
            "boost".into(),
            json!({ "tau": tau, "t": t, "bound": b.bound, "exact_tail": b.exact_tail }),
        );
    }
    if v.is_empty() {
        return Err(Error::Structural(
            "nothing to do: give --alpha/--delta, --alpha/--beta or --tau".into(),
        ));
    }
    Ok(doc(Value::Object(v)))
}

fn quantize(a: QuantizeArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let obj = a.objective.objective();
    let sol = optimal_quantizer_dp(&p, &q, a.d, &obj)?;
    let mut v = json!({ "solution": to_value(&sol), "input_objective": obj.value(p.probs(), q.probs()) });
    if a.brute {
        let (best, cells) = brute_force_quantizer(&p, &q, a.d, &obj)?;
        v["brute_force"] = json!({ "objective": best, "cells": cells, "gap": best - sol.objective });
    }
    if let (Some(alpha), Some(delta)) = (a.alpha, a.delta) {
        v["complexity"] = to_value(&constrained_complexity_check(&p, &q, alpha, delta, a.d, &obj, a.cap)?);
    }
    Ok(doc(v))
}

fn ldp(a: LdpArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let sol = ldp_brute_optimize(&p, &q, a.epsilon, a.d, &a.objective.objective())?;
    Ok(doc(to_value(&sol)))
}

fn robust_lfd(a: LfdArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let lfd = huber_lfd(&p, &q, a.epsilon)?;
    let mut v = json!({ "lfd": to_value(&lfd), "clipping_error": lfd.clipping_error(&p, &q) });
    if let (Some(alpha), Some(delta)) = (a.alpha, a.delta) {
        let base = n_star_bayes_exact(&TestingInstance::bayesian(p.clone(), q.clone(), alpha, delta)?, a.cap)?;
        let robust = n_star_bayes_exact(
            &TestingInstance::bayesian(lfd.p_prime.clone(), lfd.q_prime.clone(), alpha, delta)?,
            a.cap,
        )?;
        v["n_star"] = to_value(&base);
        v["n_star_robust"] = to_value(&robust);
    }
    Ok(doc(v))
}

fn simulate(a: SimulateArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    if a.trials == 0 {
        return Err(domain("--trials must be at least 1"));
    }
    let cfg = SimConfig {
        threshold: a.threshold,
        ..SimConfig::new(a.trials, a.seed, a.n)
    };
    let mut v = match a.buckets {
        Some(t) => to_value(&simulate_boosted(&p, &q, a.alpha, t, &cfg)?),
        None => to_value(&simulate_lrt(&p, &q, a.alpha, &cfg)?),
    };
    if a.exact && a.buckets.is_none() {
        v["exact_bayes_error"] = json!(bayes_error_exact(&p, &q, a.alpha, a.n)?);
    }
    v["config"] = to_value(&cfg);
    Ok(doc(v))
}

fn grid(from: f64, to: f64, steps: usize, log: bool) -> Result<Vec<f64>, Error> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(domain("need finite --from/--to and --steps >= 1"));
    }
    if log && !(from > 0.0 && to > 0.0) {
        return Err(domain("--log needs positive endpoints"));
    }
    let at = |i: usize| {
        let t = if steps == 1 { 0.0 } else { i as f64 / (steps - 1) as f64 };
        if log {
            (from.ln() + t * (to.ln() - from.ln())).exp()
        } else {
            from + t * (to - from)
        }
    };
    Ok((0..steps).map(at).collect())
}

fn sweep(a: SweepArgs) -> Result<Output, Error> {
    let (p, q) = a.pair.load()?;
    let xs = grid(a.from, a.to, a.steps, a.log)?;
    let point = |x: f64| -> Result<(f64, Option<f64>, Option<u64>), Error> {
        let alpha = if a.vary == SweepParam::Alpha { Some(x) } else { a.alpha };
        let alpha = alpha.ok_or_else(|| Error::Structural("--alpha is required".into()))?;
        let delta = match a.vary {
            SweepParam::Delta => Some(x),
            _ => a.delta.or(a.delta_ratio.map(|r| r * alpha)),
        };
        let n = if a.vary == SweepParam::N {
            Some(x.round() as u64)
        } else {
            a.n
        };
        Ok((alpha, delta, n))
    };
    let need_delta = |d: Option<f64>| d.ok_or_else(|| Error::Structural("--delta or --delta-ratio is required".into()));
    let columns: Vec<&'static str> = match a.quantity {
        Quantity::BayesError => vec!["index", "alpha", "n", "bayes_error"],
        Quantity::ExactN => vec!["index", "alpha", "delta", "n_star"],
        Quantity::EstimateN => vec!["index", "alpha", "delta", "regime", "lower", "point", "upper"],
    };
    let rows: Result<Vec<Vec<Value>>, Error> = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let (alpha, delta, n) = point(x)?;
            Ok(match a.quantity {
                Quantity::BayesError => {
                    let n = n.ok_or_else(|| Error::Structural("--n is required".into()))?;
                    vec![
                        json!(i),
                        json!(alpha),
                        json!(n),
                        json!(bayes_error_exact(&p, &q, alpha, n)?),
                    ]
                }
                Quantity::ExactN => {
                    let d = need_delta(delta)?;
                    let inst = TestingInstance::bayesian(p.clone(), q.clone(), alpha, d)?;
                    vec![
                        json!(i),
                        json!(alpha),
                        json!(d),
                        to_value(&n_star_bayes_exact(&inst, a.cap)?),
                    ]
                }
                Quantity::EstimateN => {
                    let d = need_delta(delta)?;
                    let e = n_star_bayes_estimate(&p, &q, alpha, d)?;
                    vec![
                        json!(i),
                        json!(alpha),
                        json!(d),
                        to_value(&e.regime),
                        json!(e.lower),
                        json!(e.point),
                        json!(e.upper),
                    ]
                }
            })
        })
        .collect();
    Ok(Output::Table { columns, rows: rows? })
}

fn print(out: &Output, format: Format) -> Result<(), Error> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match (out, format) {
        (Output::Doc { value, .. }, Format::Json) => {
            writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
        }
        (Output::Table { columns, rows }, Format::Json) => {
            let objs: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            writeln!(w, "{}", serde_json::to_string_pretty(&objs)?)?;
        }
        (Output::Doc { value, .. }, Format::Csv) => {
            let mut cw = csv::Writer::from_writer(w);
            cw.write_record(["key", "value"])?;
            let mut flat = Vec::new();
            flatten("", value, &mut flat);
            for (k, v) in flat {
                cw.write_record([k, v])?;
            }
            cw.flush()?;
        }
        (Output::Table { columns, rows }, Format::Csv) => {
            let mut cw = csv::Writer::from_writer(w);
            cw.write_record(columns)?;
            for r in rows {
                cw.write_record(r.iter().map(scalar))?;
            }
            cw.flush()?;
        }
    }
    Ok(())
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Dotted-path rows for every leaf of a JSON document.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        leaf => out.push((prefix.to_string(), scalar(leaf))),
    }
}
