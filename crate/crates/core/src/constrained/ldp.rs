//! Approximate search for the best binary ε-LDP mechanism on a tiny alphabet.
//!
//! Rows are `(t_x, 1 − t_x)`. A coarse grid over `t` is followed by a local
//! search whose step halves down to `2^{-20}`; the answer is therefore only as
//! good as that resolution. Besides lattice moves the local search scales
//! `t` (and `1 − t`) as a whole, which slides along the two privacy
//! constraints where pure coordinate moves stall.

use serde::Serialize;

use super::channel::{ldp_feasible_matrix, Channel};
use super::Objective;
use crate::distribution::{check_aligned, Distribution};
use crate::error::{Error, Result};

pub const LDP_MAX_INPUTS: usize = 4;
pub const LDP_GRID_STEPS: u32 = 64;
pub const LDP_FINAL_STEP: f64 = 1.0 / 1_048_576.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LdpSolution {
    pub channel: Channel,
    pub objective: f64,
    pub epsilon: f64,
    pub grid_step: f64,
    pub final_step: f64,
    pub evaluations: u64,
}

struct Problem<'a> {
    p: &'a [f64],
    q: &'a [f64],
    objective: &'a Objective,
    factor: f64,
    evaluations: u64,
}

impl Problem<'_> {
    fn feasible(&self, t: &[f64]) -> bool {
        if self.factor.is_infinite() {
            return true;
        }
        let (lo, hi) = t
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(a, b), &x| (a.min(x), b.max(x)));
        hi <= self.factor * lo + super::channel::LDP_SLACK
            && (1.0 - lo) <= self.factor * (1.0 - hi) + super::channel::LDP_SLACK
    }

    fn value(&mut self, t: &[f64]) -> f64 {
        self.evaluations += 1;
        let (mut p1, mut p0, mut q1, mut q0) = (0.0, 0.0, 0.0, 0.0);
        for ((&x, &a), &b) in t.iter().zip(self.p).zip(self.q) {
            p1 += a * x;
            p0 += a * (1.0 - x);
            q1 += b * x;
            q0 += b * (1.0 - x);
        }
        self.objective.term(p0, q0) + self.objective.term(p1, q1)
    }
}

/// Steps an odometer over `{0, …, base−1}^len`; false once it wraps around.
fn odometer(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Best binary ε-LDP channel for `|X| ≤ 4` by grid search (step 1/64) and
/// local refinement. `epsilon = ∞` means unconstrained.
pub fn ldp_brute_optimize(
    p: &Distribution,
    q: &Distribution,
    epsilon: f64,
    d: usize,
    objective: &Objective,
) -> Result<LdpSolution> {
    check_aligned(p, q)?;
    objective.validate()?;
    if !(epsilon >= 0.0) {
        return Err(Error::domain(format!("epsilon = {epsilon} must be nonnegative")));
    }
    let k = p.len();
    if d != 2 {
        return Err(Error::Capacity {
            what: "LDP output alphabet",
            needed: d as u128,
            limit: 2,
        });
    }
    if k > LDP_MAX_INPUTS {
        return Err(Error::Capacity {
            what: "LDP input alphabet",
            needed: k as u128,
            limit: LDP_MAX_INPUTS as u128,
        });
    }
    let mut prob = Problem {
        p: p.probs(),
        q: q.probs(),
        objective,
        factor: epsilon.exp(),
        evaluations: 0,
    };

    let base = LDP_GRID_STEPS + 1;
    let mut digits = vec![0u32; k];
    let mut best_t = vec![0.0; k];
    let mut best = prob.value(&best_t);
    let mut t = vec![0.0; k];
    loop {
        for (x, &dg) in t.iter_mut().zip(&digits) {
            *x = dg as f64 / LDP_GRID_STEPS as f64;
        }
        if prob.feasible(&t) {
            let v = prob.value(&t);
            if v > best {
                best = v;
                best_t.clone_from(&t);
            }
        }
        if !odometer(&mut digits, base) {
            break;
        }
    }

    // Local lattice search over offsets {-2..2}^k with halving steps.
    let mut step = 0.5 / LDP_GRID_STEPS as f64;
    while step >= LDP_FINAL_STEP {
        let mut improved = true;
        let mut sweeps = 0;
        while improved && sweeps < 1000 {
            improved = false;
            sweeps += 1;
            let mut off = vec![0u32; k];
            loop {
                let mut cand = best_t.clone();
                let mut inside = true;
                for (c, &o) in cand.iter_mut().zip(&off) {
                    *c += (o as f64 - 2.0) * step;
                    inside &= (0.0..=1.0).contains(c);
                }
                if inside && prob.feasible(&cand) {
                    let v = prob.value(&cand);
                    if v > best {
                        best = v;
                        best_t = cand;
                        improved = true;
                    }
                }
                if !odometer(&mut off, 5) {
                    break;
                }
            }
            for sign in [1.0, -1.0] {
                let f = 1.0 + sign * step;
                let scaled: Vec<f64> = best_t.iter().map(|&x| x * f).collect();
                let co_scaled: Vec<f64> = best_t.iter().map(|&x| 1.0 - (1.0 - x) * f).collect();
                for cand in [scaled, co_scaled] {
                    if cand.iter().all(|c| (0.0..=1.0).contains(c)) && prob.feasible(&cand) {
                        let v = prob.value(&cand);
                        if v > best {
                            best = v;
                            best_t = cand;
                            improved = true;
                        }
                    }
                }
            }
        }
        step *= 0.5;
    }

    let matrix: Vec<Vec<f64>> = best_t.iter().map(|&x| vec![x, 1.0 - x]).collect();
    debug_assert!(ldp_feasible_matrix(&matrix, epsilon));
    let level = epsilon.is_finite().then_some(epsilon);
    Ok(LdpSolution {
        channel: Channel::new(matrix, level)?,
        objective: best,
        epsilon,
        grid_step: 1.0 / LDP_GRID_STEPS as f64,
        final_step: LDP_FINAL_STEP,
        evaluations: prob.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constrained::optimal_quantizer_dp;
    use crate::instances::{random_distribution, seeded_rng};

    /// Randomized response composed with the best subset split: the
    /// objective is convex in the channel, so an optimum sits at a vertex of
    /// the feasible polytope, and every such vertex has this form.
    fn vertex_optimum(p: &[f64], q: &[f64], eps: f64, obj: &Objective) -> f64 {
        let e = eps.exp();
        let (lo, hi) = (1.0 / (1.0 + e), e / (1.0 + e));
        let k = p.len();
        (0..(1u32 << k))
            .map(|mask| {
                let (mut p1, mut q1, mut p0, mut q0) = (0.0, 0.0, 0.0, 0.0);
                for x in 0..k {
                    let t = if mask >> x & 1 == 1 { hi } else { lo };
                    p1 += p[x] * t;
                    q1 += q[x] * t;
                    p0 += p[x] * (1.0 - t);
                    q0 += q[x] * (1.0 - t);
                }
                obj.term(p0, q0) + obj.term(p1, q1)
            })
            .fold(0.0, f64::max)
    }

    fn fine_grid(p: &[f64], q: &[f64], eps: f64, obj: &Objective, steps: u32) -> f64 {
        let e = eps.exp();
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..=steps {
                let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                let (lo, hi) = (a.min(b), a.max(b));
                if hi <= e * lo + 1e-12 && 1.0 - lo <= e * (1.0 - hi) + 1e-12 {
                    let v = obj.term(p[0] * (1.0 - a) + p[1] * (1.0 - b), q[0] * (1.0 - a) + q[1] * (1.0 - b))
                        + obj.term(p[0] * a + p[1] * b, q[0] * a + q[1] * b);
                    best = best.max(v);
                }
            }
        }
        best
    }

    #[test]
    fn zero_epsilon_gives_nothing() {
        let p = Distribution::from_probs(vec![0.1, 0.2, 0.7]).unwrap();
        let q = Distribution::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
        let s = ldp_brute_optimize(&p, &q, 0.0, 2, &Objective::HLambda { lambda: 0.4 }).unwrap();
        assert!(s.objective.abs() < 1e-12);
    }

    #[test]
    fn infinite_epsilon_recovers_quantizer() {
        let mut rng = seeded_rng(8);
        for k in 2..=4 {
            let p = random_distribution(&mut rng, k, 0.0);
            let q = random_distribution(&mut rng, k, 0.0);
            let obj = Objective::JsAlpha { alpha: 0.2 };
            let s = ldp_brute_optimize(&p, &q, f64::INFINITY, 2, &obj).unwrap();
            let dp = optimal_quantizer_dp(&p, &q, 2, &obj).unwrap();
            assert!((s.objective - dp.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn epsilon_one_binary_matches_fine_grid() {
        let mut rng = seeded_rng(21);
        for _ in 0..5 {
            let p = random_distribution(&mut rng, 2, 0.0);
            let q = random_distribution(&mut rng, 2, 0.0);
            let obj = Objective::HLambda { lambda: 0.5 };
            let s = ldp_brute_optimize(&p, &q, 1.0, 2, &obj).unwrap();
            let fine = fine_grid(p.probs(), q.probs(), 1.0, &obj, 1024);
            let exact = vertex_optimum(p.probs(), q.probs(), 1.0, &obj);
            assert!(s.objective >= fine - 1e-12, "{} < {fine}", s.objective);
            assert!(s.objective <= exact + 1e-12);
            assert!(ldp_feasible_matrix(s.channel.matrix(), 1.0));
        }
    }

    #[test]
    fn close_to_vertex_optimum_on_four_symbols() {
        let mut rng = seeded_rng(4);
        for eps in [0.3, 1.0, 2.5] {
            let p = random_distribution(&mut rng, 4, 0.0);
            let q = random_distribution(&mut rng, 4, 0.0);
            let obj = Objective::JsAlpha { alpha: 0.3 };
            let s = ldp_brute_optimize(&p, &q, eps, 2, &obj).unwrap();
            let exact = vertex_optimum(p.probs(), q.probs(), eps, &obj);
            assert!(s.objective <= exact + 1e-12);
            assert!(
                s.objective >= exact * (1.0 - 1e-4),
                "eps={eps}: {} vs {exact}",
                s.objective
            );
        }
    }

    #[test]
    fn size_limits() {
        let p = Distribution::from_probs(vec![0.2; 5]).unwrap();
        let obj = Objective::HLambda { lambda: 0.5 };
        assert!(matches!(
            ldp_brute_optimize(&p, &p, 1.0, 2, &obj),
            Err(Error::Capacity { .. })
        ));
        let p = Distribution::from_probs(vec![0.5; 2]).unwrap();
        assert!(matches!(
            ldp_brute_optimize(&p, &p, 1.0, 3, &obj),
            Err(Error::Capacity { .. })
        ));
    }
}
