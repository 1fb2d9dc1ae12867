//! Exact bounds, certified witness constructions, and linear-programming
//! relaxations for window-integral ratios of doubly positive functions
//! (functions that are both pointwise nonnegative and positive definite).
//!
//! The crate keeps two strictly separated arithmetic worlds:
//!
//! * exact [`rational::Rational`] arithmetic for every closed-form bound,
//!   every piecewise-linear construction, every majorization check, and the
//!   default LP solver — these quantities pass through floors/ceilings and
//!   tight inequalities, where floating point would silently corrupt them;
//! * `f64` for quadrature of sampled smooth functions, eigenvalue estimates,
//!   and the primal ascent search, none of which feed back into exact claims
//!   without an exact re-verification step.

// Error payloads carry exact rationals and are cold; `!(x > 0.0)` rejects
// NaN; tableau and Gram-matrix code uses index arithmetic.
#![allow(clippy::result_large_err)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod cli;
pub mod certify;
pub mod extremal;
pub mod piecewise;
pub mod quadrature;
pub mod rational;
pub mod simplex;
pub mod witness;

pub use piecewise::{Comparison, PiecewiseLinearFn, Side};
pub use rational::Rational;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid interval: lower bound {lo} is not strictly below {hi}")]
    InvalidInterval { lo: Rational, hi: Rational },

    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    Parse(String),

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },

    #[error("denominator integral {value:e} is below the degeneracy floor")]
    DegenerateDenominator { value: f64 },

    #[error(
        "concentration infeasible: no cosine power up to the cap {cap} pushes the \
         per-period mass outside the window below {tol:e}"
    )]
    InfeasibleConcentration { cap: u32, tol: f64 },

    #[error(
        "samples are not even: |f({x}) - f({minus_x})| = {deviation:e} exceeds the \
         evenness tolerance (positive definite real functions are even)"
    )]
    NotEven {
        x: f64,
        minus_x: f64,
        deviation: f64,
    },

    #[error(
        "degenerate majorization band for shift {a}, order {k}, parameter {p}: \
         the band has length {len} <= 0"
    )]
    DegenerateBand {
        a: Rational,
        k: i64,
        p: Rational,
        len: Rational,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
