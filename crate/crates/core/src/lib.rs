//! Exact and formula-based sample complexity for simple binary hypothesis testing.
//!
//! Given two finite distributions `p` and `q`, the crate computes the number of
//! i.i.d. samples needed to tell them apart: exactly (by enumerating the
//! likelihood-ratio distribution) and through closed-form characterizations
//! with certified bounds. It also covers prior-free and weak-detection
//! variants, boosting/self-reduction, communication and privacy constraints,
//! robust testing, and Monte Carlo confirmation.

// NaN inputs must fail validation, so range checks are written as `!(x >= lo)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constrained;
pub mod distribution;
pub mod divergences;
pub mod error;
pub mod exact;
pub mod formulas;
pub mod inequality;
pub mod instances;
pub mod numeric;
pub mod reductions;
pub mod simulate;

pub use distribution::Distribution;
pub use error::{Error, Result};
