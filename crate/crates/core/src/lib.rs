//! Numerical laboratory for the second moment of the Riemann zeta-function
//! on the critical line.
//!
//! The crate is organised bottom-up:
//!
//! * [`zeta`] evaluates ζ(½+it), samples |ζ(½+it)|² on uniform grids and
//!   integrates those samples. Grids can be cached in the `ZGRID1` binary
//!   format.
//! * [`divisor`] sieves d(n), evaluates the divisor-problem error term Δ(x)
//!   and the summatory function of d²(n).
//! * [`atkinson`] implements Atkinson's explicit formula for E(T) next to the
//!   direct definition, plus Jutila's short-interval mean square.
//! * [`smoothed`] computes the Gaussian-smoothed moment I₁(t,G) by quadrature
//!   and the difference I₁(t+U,G) − I₁(t,G) by its explicit divisor-sum
//!   representation.
//! * [`experiments`] runs the mean-square experiments and the log-cubic fits.

// `!(x > 0.0)` style checks deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atkinson;
pub mod ddouble;
pub mod divisor;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod report;
pub mod smoothed;
pub mod sum;
pub mod zeta;

pub use error::{LabError, Result};

/// Euler's constant γ = −Γ′(1).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ε used by every asymptotic range validator.
pub const RANGE_EPSILON: f64 = 0.05;
