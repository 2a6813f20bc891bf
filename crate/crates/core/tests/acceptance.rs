//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use bht_core::constrained::{
    brute_force_quantizer, constrained_complexity_check, huber_lfd, optimal_quantizer_dp, Objective,
};
use bht_core::divergences::{h_lambda, js_alpha, tv_slices, LambdaParam};
use bht_core::exact::{bayes_error_exact, n_star_bayes_exact, np_curve_point, TestingInstance, DEFAULT_N_CAP};
use bht_core::inequality::{
    check_js_h_inequality, check_linear_vs_nearly_linear, derivative_sweep, log_grid, weak_detection_examples,
    GridSpec, LINEAR_R,
};
use bht_core::instances::{log_uniform, random_distribution, random_pair_with_h2, seeded_rng};
use bht_core::reductions::{boost_bound_holds_exact, verify_error_amplification};
use bht_core::Distribution;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ber(x: f64) -> Distribution {
    Distribution::bernoulli(x).unwrap()
}

// ---------------------------------------------------------------------------
// 1. Exact oracle against sequence enumeration.

/// `(P(x^n), Q(x^n))` for every sequence in `[k]^n`.
fn all_sequences(p: &[f64], q: &[f64], n: u32) -> Vec<(f64, f64)> {
    let k = p.len();
    let mut out = vec![(1.0, 1.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * k);
        for &(a, b) in &out {
            for x in 0..k {
                next.push((a * p[x], b * q[x]));
            }
        }
        out = next;
    }
    out
}

fn enum_bayes(seqs: &[(f64, f64)], alpha: f64) -> f64 {
    seqs.iter().map(|&(a, b)| (alpha * a).min((1.0 - alpha) * b)).sum()
}

/// Best type-II error over every randomized likelihood-ratio threshold test
/// with type-I error at most `a1`: for each LLR level, randomize on that level
/// to spend exactly the remaining type-I budget if possible.
fn enum_np(seqs: &[(f64, f64)], a1: f64) -> f64 {
    let mut pts: Vec<(f64, f64, f64)> = seqs
        .iter()
        .filter(|(a, b)| *a > 0.0 || *b > 0.0)
        .map(|&(a, b)| ((a / b).ln(), a, b))
        .collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut levels: Vec<(f64, f64, f64)> = Vec::new();
    for (l, a, b) in pts {
        match levels.last_mut() {
            Some(last) if (l == last.0) || (l.is_finite() && last.0.is_finite() && (l - last.0).abs() <= 1e-9) => {
                last.1 += a;
                last.2 += b;
            }
            _ => levels.push((l, a, b)),
        }
    }
    let total_q: f64 = levels.iter().map(|x| x.2).sum();
    // Deciding p everywhere: type-I 0, type-II total_q.
    let mut best = total_q;
    let mut p_below = 0.0;
    let mut q_below = 0.0;
    for &(_, pa, qa) in &levels {
        // Reject p (say q) on all lower levels, randomize on this one.
        let lo = p_below;
        if lo <= a1 + 1e-15 {
            let frac = if pa > 0.0 {
                ((a1 - lo) / pa).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let type2 = total_q - q_below - frac * qa;
            best = best.min(type2);
        }
        p_below += pa;
        q_below += qa;
    }
    best.max(0.0)
}

fn c1_oracle() -> Outcome {
    let mut rng = seeded_rng(101);
    let mut cases = Vec::new();
    for k in 1..=3usize {
        for _ in 0..12 {
            let zero = if k == 1 { 0.0 } else { 0.25 };
            cases.push((
                random_distribution(&mut rng, k, zero),
                random_distribution(&mut rng, k, zero),
            ));
        }
    }
    cases.push((ber(0.0), ber(0.3)));
    cases.push((ber(1.0), ber(0.0)));
    let alphas = [0.5, 0.2, 0.03];
    let a1s = [0.0, 0.01, 0.1, 0.37, 0.8, 1.0];
    let results: Vec<(usize, f64)> = cases
        .par_iter()
        .map(|(p, q)| {
            let mut checks = 0;
            let mut worst: f64 = 0.0;
            for n in 0..=6u32 {
                let seqs = all_sequences(p.probs(), q.probs(), n);
                for &a in &alphas {
                    let e = bayes_error_exact(p, q, a, n as u64).unwrap();
                    worst = worst.max((e - enum_bayes(&seqs, a)).abs());
                    checks += 1;
                }
                for &a1 in &a1s {
                    let v = np_curve_point(p, q, n as u64, a1).unwrap();
                    worst = worst.max((v - enum_np(&seqs, a1)).abs());
                    checks += 1;
                }
            }
            (checks, worst)
        })
        .collect();
    let checks: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("{checks} comparisons, max |diff| {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 2. Ber(0) versus Ber(ε) closed form.

fn c2_closed_form() -> Outcome {
    let jobs: Vec<(f64, f64)> = (1..=50)
        .flat_map(|i| [0.5, 0.1, 0.01].map(|a| (i as f64 / 100.0, a)))
        .collect();
    let worst = jobs
        .par_iter()
        .map(|&(eps, alpha)| {
            let (p, q) = (ber(0.0), ber(eps));
            (0..=500u64)
                .map(|n| {
                    let oracle = bayes_error_exact(&p, &q, alpha, n).unwrap();
                    let closed = alpha.min((1.0 - alpha) * (1.0 - eps).powi(n as i32));
                    (oracle - closed).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 1e-12,
        format!(
            "{} (eps, alpha) pairs x n in 0..=500, max |diff| {worst:.2e}",
            jobs.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. Linear-regime sandwich.

fn c3_sandwich() -> Outcome {
    let mut rng = seeded_rng(303);
    let mut cases = Vec::new();
    for i in 0..240 {
        let k = 2 + i % 3;
        let (p, q) = random_pair_with_h2(&mut rng, k, 0.04, 0.125).unwrap();
        let alpha = log_uniform(&mut rng, 2f64.powi(-10), 0.5);
        cases.push((p, q, alpha));
    }
    let rows: Vec<(u64, u64, u64)> = cases
        .par_iter()
        .map(|(p, q, alpha)| {
            let alpha = *alpha;
            let js = js_alpha(p, q, alpha).unwrap();
            let lam = LambdaParam::linear_for_prior(alpha).unwrap();
            let hb = h_lambda(p, q, LambdaParam::new(lam.bar()).unwrap()).unwrap();
            let lower = (3.0 / 16.0 * alpha * (1.0 / alpha).ln() / js).ceil() as u64;
            let upper = (2.0 / hb).ceil() as u64;
            let inst = TestingInstance::bayesian(p.clone(), q.clone(), alpha, alpha / 4.0).unwrap();
            let n = n_star_bayes_exact(&inst, DEFAULT_N_CAP).unwrap().or_max();
            (lower, n, upper)
        })
        .collect();
    let bad = rows.iter().filter(|(l, n, u)| !(l <= n && n <= u)).count();
    let max_n = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let tight_lo = rows
        .iter()
        .map(|(l, n, _)| *n as f64 / *l as f64)
        .fold(f64::INFINITY, f64::min);
    let tight_hi = rows
        .iter()
        .map(|(_, n, u)| *u as f64 / *n as f64)
        .fold(f64::INFINITY, f64::min);
    outcome(
        bad == 0,
        format!(
            "{} instances, {bad} violations, max n* {max_n}, min n*/lower {tight_lo:.2}, min upper/n* {tight_hi:.2}",
            rows.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. Comparison inequality on the Bernoulli grid.

fn c4_grid() -> Outcome {
    let grid = GridSpec::default();
    let rep = check_js_h_inequality(&grid).unwrap();
    let pass = rep.passed() && rep.points >= 3_000_000 && rep.alphas == 20;
    outcome(pass, rep.to_string())
}

// ---------------------------------------------------------------------------
// 5. Derivative formulas and the scalar bound.

fn c5_derivatives() -> Outcome {
    let d = derivative_sweep(10_000, 505, 1e-5, 1e-6).unwrap();
    let xs = log_grid(10_000, 1e-12, 1e12);
    let mut viol = 0;
    let mut max_ratio: f64 = 0.0;
    for i in 1..=20 {
        let alpha = 0.5f64.powi(i);
        let lam_max = LINEAR_R / (1.0 / alpha).ln();
        for lam in [lam_max, 0.5 * lam_max] {
            let r = check_linear_vs_nearly_linear(&xs, alpha, lam, LINEAR_R).unwrap();
            viol += r.violations + r.branch_violations;
            max_ratio = max_ratio.max(r.max_ratio);
        }
    }
    outcome(
        d.failures == 0 && viol == 0,
        format!("{d}; scalar bound: {viol} violations over 20 alphas, max ratio {max_ratio:.6}"),
    )
}

// ---------------------------------------------------------------------------
// 6. Reductions.

fn c6_reductions() -> Outcome {
    let mut rng = seeded_rng(606);
    let mut cases = Vec::new();
    while cases.len() < 50 {
        let k = 2 + cases.len() % 2;
        let (p, q) = random_pair_with_h2(&mut rng, k, 0.06, 0.125).unwrap();
        let a = log_uniform(&mut rng, 2f64.powi(-12), 2f64.powi(-7));
        let b = log_uniform(&mut rng, 2f64.powi(-12), 2f64.powi(-7));
        cases.push((p, q, a, b));
    }
    let res: Vec<(usize, usize, usize)> = cases
        .par_iter()
        .map(|(p, q, a, b)| {
            let mut out = (0, 0, 0);
            for t in 1..=3 {
                let r = verify_error_amplification(p, q, *a, *b, t, DEFAULT_N_CAP).unwrap();
                if r.skipped.is_some() {
                    out.2 += 1;
                } else {
                    out.0 += 1;
                    if !r.holds {
                        out.1 += 1;
                    }
                }
            }
            out
        })
        .collect();
    let checked: usize = res.iter().map(|r| r.0).sum();
    let failed: usize = res.iter().map(|r| r.1).sum();
    let skipped: usize = res.iter().map(|r| r.2).sum();

    let mut taus: Vec<(u64, u64)> = (1..=16).map(|k| (k, 64)).collect();
    taus.extend((1..=25).map(|k| (k, 100)));
    let jobs: Vec<(u64, u64, u32)> = taus
        .iter()
        .flat_map(|&(a, b)| (1..=200).map(move |t| (a, b, t)))
        .collect();
    let boost_fail = jobs
        .par_iter()
        .filter(|&&(a, b, t)| !boost_bound_holds_exact(a, b, t))
        .count();
    outcome(
        failed == 0 && skipped == 0 && checked == 150 && boost_fail == 0,
        format!(
            "amplification: {checked} checks, {failed} failures, {skipped} skipped; boost bound: {} (tau, T) pairs, {boost_fail} failures",
            jobs.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. Asymmetry of the Bernoulli pair.

fn c7_asymmetry() -> Outcome {
    let (alpha, delta, eps) = (0.1, 0.01, 0.1);
    let n = |p: Distribution, q: Distribution| {
        n_star_bayes_exact(&TestingInstance::bayesian(p, q, alpha, delta).unwrap(), DEFAULT_N_CAP)
            .unwrap()
            .or_max()
    };
    let forward = n(ber(0.0), ber(eps));
    let backward = n(ber(eps), ber(0.0));
    let l = -(-eps).ln_1p();
    let cf_forward = (((1.0 - alpha) / delta).ln() / l).ceil() as u64;
    let cf_backward = ((alpha / delta).ln() / l).ceil() as u64;
    let ratio = forward as f64 / backward as f64;
    outcome(
        ratio >= 1.5 && forward == cf_forward && backward == cf_backward,
        format!(
            "n*(Ber(0),Ber(0.1)) = {forward} (closed form {cf_forward}), swapped {backward} (closed form {cf_backward}), ratio {ratio:.3}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. Weak detection.

fn c8_weak() -> Outcome {
    let r = weak_detection_examples().unwrap();
    outcome(r.passed(), r.to_string())
}

// ---------------------------------------------------------------------------
// 9. Quantizers.

fn c9_quantizer() -> Outcome {
    let mut rng = seeded_rng(909);
    let pairs: Vec<(Distribution, Distribution)> = (0..100)
        .map(|_| {
            let k = rng.random_range(2..=8);
            (
                random_distribution(&mut rng, k, 0.1),
                random_distribution(&mut rng, k, 0.1),
            )
        })
        .collect();
    let objectives = [Objective::HLambda { lambda: 0.3 }, Objective::JsAlpha { alpha: 0.1 }];
    let dp_worst = pairs
        .par_iter()
        .map(|(p, q)| {
            let mut w: f64 = 0.0;
            for obj in &objectives {
                for d in 1..=3 {
                    let dp = optimal_quantizer_dp(p, q, d, obj).unwrap().objective;
                    let bf = brute_force_quantizer(p, q, d, obj).unwrap().0;
                    w = w.max((dp - bf).abs());
                }
            }
            w
        })
        .reduce(|| 0.0, f64::max);

    // Complexity family: two independent halves, the fitted constant is the
    // largest ratio / max(1, ln(n*/α)/D) seen in each.
    let mut fam = Vec::new();
    for i in 0..120 {
        let k = 4 + i % 3;
        let (p, q) = random_pair_with_h2(&mut rng, k, 0.08, 0.125).unwrap();
        let alpha = [0.25, 0.1, 0.03][i % 3];
        let d = 2 + (i / 3) % 2;
        fam.push((p, q, alpha, d));
    }
    let reps: Vec<_> = fam
        .par_iter()
        .map(|(p, q, alpha, d)| {
            let obj = Objective::JsAlpha { alpha: *alpha };
            constrained_complexity_check(p, q, *alpha, alpha / 4.0, *d, &obj, DEFAULT_N_CAP).unwrap()
        })
        .collect();
    let monotone_fail = reps.iter().filter(|r| r.n_quantized < r.n_star).count();
    let half = reps.len() / 2;
    let c_of = |s: &[bht_core::constrained::ConstrainedReport]| s.iter().map(|r| r.fitted_constant).fold(0.0, f64::max);
    let (ca, cb) = (c_of(&reps[..half]), c_of(&reps[half..]));
    let c_all = ca.max(cb);
    let sharp = reps.iter().map(|r| r.fitted_constant_sharp).fold(0.0, f64::max);
    let stable = (ca / cb - 1.0).abs() <= 0.2;
    outcome(
        dp_worst <= 1e-12 && monotone_fail == 0 && stable,
        format!(
            "DP vs brute force max |diff| {dp_worst:.2e}; {} complexity instances, {monotone_fail} with n_q < n*; fitted C = {c_all:.3} (halves {ca:.3} / {cb:.3}); with ln(n*) denominator {sharp:.3}",
            reps.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 10. Least favorable pairs.

fn c10_huber() -> Outcome {
    let mut rng = seeded_rng(1010);
    let mut cases = Vec::new();
    for i in 0..20 {
        let k = 2 + i % 4;
        let (p, q) = random_pair_with_h2(&mut rng, k, 0.08, 0.125).unwrap();
        let frac = 0.05 + 0.25 * rng.random::<f64>();
        cases.push((p, q, frac));
    }
    let rows: Vec<(f64, f64, u64, u64)> = cases
        .par_iter()
        .map(|(p, q, frac)| {
            let eps = frac * tv_slices(p.probs(), q.probs());
            let l = huber_lfd(p, q, eps).unwrap();
            let budget = (l.tv_p - eps).abs().max((l.tv_q - eps).abs());
            // Pointwise log-ratio check against the clipped input ratio.
            let mut clip: f64 = 0.0;
            for i in 0..p.len() {
                let (a, b) = (l.p_prime.probs()[i], l.q_prime.probs()[i]);
                let want = (p.probs()[i] / q.probs()[i]).clamp(l.clip_lo, l.clip_hi).ln();
                clip = clip.max(((a / b).ln() - want).abs());
            }
            let alpha = 0.2;
            let n = |x: &Distribution, y: &Distribution| {
                n_star_bayes_exact(
                    &TestingInstance::bayesian(x.clone(), y.clone(), alpha, alpha / 4.0).unwrap(),
                    DEFAULT_N_CAP,
                )
                .unwrap()
            };
            let base = n(p, q);
            let robust = n(&l.p_prime, &l.q_prime);
            (budget, clip, base.or_max(), robust.or_max())
        })
        .collect();
    let budget = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let clip = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let worse = rows.iter().filter(|r| r.3 < r.2).count();
    let max_ratio = rows.iter().map(|r| r.3 as f64 / r.2 as f64).fold(0.0, f64::max);
    outcome(
        budget <= 1e-10 && clip <= 1e-9 && worse == 0,
        format!(
            "{} instances: max budget error {budget:.2e}, max log-ratio clip error {clip:.2e}, {worse} with robust n* < n*, max robust/base {max_ratio:.2}",
            rows.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle correctness", c1_oracle),
        ("Ber(0)/Ber(eps) closed form", c2_closed_form),
        ("linear-regime sandwich", c3_sandwich),
        ("JS/H comparison grid", c4_grid),
        ("derivative formulas and scalar bound", c5_derivatives),
        ("reductions and boosting", c6_reductions),
        ("Bernoulli asymmetry", c7_asymmetry),
        ("weak detection", c8_weak),
        ("quantizers", c9_quantizer),
        ("least favorable pairs", c10_huber),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("[{tag}] {:>2}. {name}: {} ({secs:.1}s)", i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
