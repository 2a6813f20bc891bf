//! Exact optimal errors and sample complexities for finite distributions.
//!
//! Everything here is computed from the exact distribution of the n-sample
//! log-likelihood ratio, either streamed over type classes or materialized as
//! an [`LlrAtomTable`].
//!
//! The searches for n* assume the optimal error is non-increasing in `n`
//! (a test may always ignore extra samples). This is checked as an invariant
//! in the test suite rather than proven here.

mod search;
mod table;

pub use search::{
    n_star_bayes_exact, n_star_bayes_exact_traced, n_star_pf_exact, n_star_pf_exact_traced, NStar, SearchTrace,
    DEFAULT_N_CAP,
};
pub use table::{
    build_llr_table, build_llr_table_with, LlrAtom, LlrAtomTable, TableStrategy, CONVOLUTION_ATOM_LIMIT, MERGE_TOL,
    STREAM_LIMIT, TYPE_CLASS_LIMIT,
};

use serde::Serialize;

use crate::distribution::{check_aligned, Distribution};
use crate::divergences::binary_entropy;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use table::{build_reduced, for_each_type_class, Reduced};

/// Problem parameters for either the Bayesian or the prior-free formulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestKind {
    /// Prior `alpha` on `p`, target average error `delta`.
    Bayesian { alpha: f64, delta: f64 },
    /// Type-I error at most `alpha_t1`, type-II error at most `beta_t2`.
    PriorFree { alpha_t1: f64, beta_t2: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct TestingInstance {
    pub p: Distribution,
    pub q: Distribution,
    pub kind: TestKind,
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("{name} = {x} outside (0, 1)")));
    }
    Ok(())
}

impl TestingInstance {
    pub fn bayesian(p: Distribution, q: Distribution, alpha: f64, delta: f64) -> Result<Self> {
        check_aligned(&p, &q)?;
        open_unit("alpha", alpha)?;
        if !(delta > 0.0) {
            return Err(Error::domain(format!("delta = {delta} must be positive")));
        }
        Ok(Self {
            p,
            q,
            kind: TestKind::Bayesian { alpha, delta },
        })
    }

    pub fn prior_free(p: Distribution, q: Distribution, alpha_t1: f64, beta_t2: f64) -> Result<Self> {
        check_aligned(&p, &q)?;
        open_unit("alpha_t1", alpha_t1)?;
        open_unit("beta_t2", beta_t2)?;
        Ok(Self {
            p,
            q,
            kind: TestKind::PriorFree { alpha_t1, beta_t2 },
        })
    }
}

/// Minimum Bayes error `Σ min(α P, (1−α) Q)` over the n-sample LLR atoms.
pub fn bayes_error_exact(p: &Distribution, q: &Distribution, alpha: f64, n: u64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    let red = Reduced::new(p, q)?;
    bayes_error_reduced(&red, alpha, n)
}

pub(crate) fn bayes_error_reduced(red: &Reduced, alpha: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Ok(alpha.min(1.0 - alpha));
    }
    if red.type_class_count(n) <= STREAM_LIMIT {
        let mut acc = KahanSum::new();
        for_each_type_class(red, n, true, |pm, qm, _| acc.add((alpha * pm).min((1.0 - alpha) * qm)));
        Ok(acc.value())
    } else {
        Ok(build_reduced(red, n, TableStrategy::Convolution)?.bayes_error(alpha))
    }
}

/// Minimum type-II error over (randomized) tests with type-I error at most `alpha_t1`.
pub fn np_curve_point(p: &Distribution, q: &Distribution, n: u64, alpha_t1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha_t1) {
        return Err(Error::domain(format!("alpha_t1 = {alpha_t1} outside [0, 1]")));
    }
    let red = Reduced::new(p, q)?;
    Ok(build_reduced(&red, n, TableStrategy::Auto)?.np_type2(alpha_t1))
}

/// `I(Θ; X_1..X_n)` for `Θ ~ Ber(α)`, as `h(α) − E[h(posterior)]`.
pub fn mutual_info_product(p: &Distribution, q: &Distribution, alpha: f64, n: u64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    let red = Reduced::new(p, q)?;
    if n == 0 || red.p == red.q {
        return Ok(0.0);
    }
    let count = red.type_class_count(n);
    if count > STREAM_LIMIT {
        return Err(Error::Capacity {
            what: "type classes",
            needed: count,
            limit: STREAM_LIMIT,
        });
    }
    let mut acc = KahanSum::new();
    acc.add(binary_entropy(alpha));
    for_each_type_class(&red, n, true, |pm, qm, _| {
        let m = alpha * pm + (1.0 - alpha) * qm;
        if m > 0.0 {
            acc.add(-m * binary_entropy(alpha * pm / m));
        }
    });
    Ok(acc.value().max(0.0))
}
