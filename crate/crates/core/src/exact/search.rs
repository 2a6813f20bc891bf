//! Smallest sample size reaching a target error, by doubling then bisection.

use serde::{Serialize, Serializer};

use super::table::{build_reduced, Reduced, TableStrategy};
use super::{bayes_error_reduced, TestKind, TestingInstance};
use crate::error::{Error, Result};

pub const DEFAULT_N_CAP: u64 = 100_000;

/// Result of an n* search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NStar {
    Finite(u64),
    ExceedsCap(u64),
}

impl NStar {
    pub fn finite(self) -> Option<u64> {
        match self {
            NStar::Finite(n) => Some(n),
            NStar::ExceedsCap(_) => None,
        }
    }

    /// Finite value, or `u64::MAX` when the cap was exceeded.
    pub fn or_max(self) -> u64 {
        self.finite().unwrap_or(u64::MAX)
    }
}

impl Serialize for NStar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NStar::Finite(n) => s.serialize_u64(*n),
            NStar::ExceedsCap(_) => s.serialize_str("exceeds_cap"),
        }
    }
}

/// Every `(n, error)` pair evaluated during a search, in evaluation order.
#[derive(Debug, Clone, Serialize)]
pub struct SearchTrace {
    pub n_star: NStar,
    pub target: f64,
    pub evaluations: Vec<(u64, f64)>,
}

fn search<F: FnMut(u64) -> Result<f64>>(target: f64, cap: u64, mut err: F) -> Result<SearchTrace> {
    let mut evals = Vec::new();
    let mut ok = |n: u64, evals: &mut Vec<(u64, f64)>| -> Result<bool> {
        let e = err(n)?;
        evals.push((n, e));
        Ok(e <= target)
    };
    let done = |n_star, evaluations| {
        Ok(SearchTrace {
            n_star,
            target,
            evaluations,
        })
    };
    if cap == 0 {
        return done(NStar::ExceedsCap(0), evals);
    }
    let mut lo = 0u64;
    let mut hi = 1u64;
    loop {
        if ok(hi, &mut evals)? {
            break;
        }
        lo = hi;
        if hi == cap {
            return done(NStar::ExceedsCap(cap), evals);
        }
        hi = hi.saturating_mul(2).min(cap);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid, &mut evals)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    done(NStar::Finite(hi), evals)
}

fn identical(red: &Reduced) -> bool {
    red.p == red.q
}

/// Smallest `n` whose exact Bayes error is at most `delta`.
pub fn n_star_bayes_exact(inst: &TestingInstance, n_cap: u64) -> Result<NStar> {
    Ok(n_star_bayes_exact_traced(inst, n_cap)?.n_star)
}

pub fn n_star_bayes_exact_traced(inst: &TestingInstance, n_cap: u64) -> Result<SearchTrace> {
    let TestKind::Bayesian { alpha, delta } = inst.kind else {
        return Err(Error::domain("expected a Bayesian instance"));
    };
    let red = Reduced::new(&inst.p, &inst.q)?;
    let trivial = alpha.min(1.0 - alpha);
    if delta >= trivial {
        return Ok(SearchTrace {
            n_star: NStar::Finite(0),
            target: delta,
            evaluations: vec![(0, trivial)],
        });
    }
    if identical(&red) {
        return Ok(SearchTrace {
            n_star: NStar::ExceedsCap(n_cap),
            target: delta,
            evaluations: vec![(0, trivial)],
        });
    }
    search(delta, n_cap, |n| bayes_error_reduced(&red, alpha, n))
}

/// Smallest `n` admitting a test with type-I error at most `alpha_t1` and type-II at most `beta_t2`.
pub fn n_star_pf_exact(inst: &TestingInstance, n_cap: u64) -> Result<NStar> {
    Ok(n_star_pf_exact_traced(inst, n_cap)?.n_star)
}

pub fn n_star_pf_exact_traced(inst: &TestingInstance, n_cap: u64) -> Result<SearchTrace> {
    let TestKind::PriorFree { alpha_t1, beta_t2 } = inst.kind else {
        return Err(Error::domain("expected a prior-free instance"));
    };
    let red = Reduced::new(&inst.p, &inst.q)?;
    if alpha_t1 + beta_t2 >= 1.0 {
        return Ok(SearchTrace {
            n_star: NStar::Finite(0),
            target: beta_t2,
            evaluations: vec![(0, 1.0 - alpha_t1)],
        });
    }
    if identical(&red) {
        return Ok(SearchTrace {
            n_star: NStar::ExceedsCap(n_cap),
            target: beta_t2,
            evaluations: vec![(0, 1.0 - alpha_t1)],
        });
    }
    search(beta_t2, n_cap, |n| {
        Ok(build_reduced(&red, n, TableStrategy::Auto)?.np_type2(alpha_t1))
    })
}
