//! Evaluation of ζ(½+it) and uniform grids of |ζ(½+it)|².
//!
//! Small ordinates (and any ordinate where the requested accuracy is beyond
//! the reach of the asymptotic formula) go through Euler–Maclaurin
//! summation; everything else uses Riemann–Siegel with four correction
//! terms. Phases are reduced in double-double arithmetic whenever plain
//! f64 rounding would eat the error budget.

mod cache;
pub mod euler_maclaurin;
mod grid;
pub mod riemann_siegel;

pub use cache::{decode_grid, encode_grid, read_grid, write_grid, GRID_MAGIC};
pub use grid::{
    quad_abs2, sample_abs2_grid, sample_abs2_grid_with, ZetaGrid, MAX_GRID_STEP, MIN_GRID_START,
};

use num_complex::Complex64;

use crate::error::{ensure_input, Result};
use crate::ddouble::DoubleDouble;

/// Below this ordinate Riemann–Siegel is never used.
pub const RS_CROSSOVER: f64 = 50.0;
pub const MIN_TARGET_ERROR: f64 = 1e-13;
pub const MAX_TARGET_ERROR: f64 = 1e-3;
/// Default accuracy of grid samples.
pub const DEFAULT_ACCURACY: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    EulerMaclaurin,
    /// `precise` selects double-double phase reduction.
    RiemannSiegel { precise: bool },
}

/// Picks the cheapest evaluator that meets `target` at ordinate `t ≥ 0`.
pub fn select_method(t: f64, target: f64) -> Method {
    if t >= RS_CROSSOVER && riemann_siegel::remainder_bound(t) <= 0.5 * target {
        let precise = riemann_siegel::rounding_bound(t) > 0.5 * target;
        Method::RiemannSiegel { precise }
    } else {
        Method::EulerMaclaurin
    }
}

fn check_args(t: f64, target: f64) -> Result<()> {
    ensure_input!(t.is_finite(), "ordinate t must be finite, got {t}");
    ensure_input!(
        (MIN_TARGET_ERROR..=MAX_TARGET_ERROR).contains(&target),
        "target_abs_error must lie in [1e-13, 1e-3], got {target:e}"
    );
    ensure_input!(
        t.abs() <= riemann_siegel::max_t(),
        "|t| = {t} exceeds the supported range {:e}",
        riemann_siegel::max_t()
    );
    Ok(())
}

/// ζ(½+it) with absolute error at most `target_abs_error`.
pub fn zeta_half_line(t: f64, target_abs_error: f64) -> Result<Complex64> {
    check_args(t, target_abs_error)?;
    let ta = t.abs();
    let z = match select_method(ta, target_abs_error) {
        Method::EulerMaclaurin => euler_maclaurin::zeta(ta, target_abs_error),
        Method::RiemannSiegel { precise } => {
            let z = riemann_siegel::z_function(ta, precise);
            let theta = if precise {
                riemann_siegel::theta_dd(ta).rem_two_pi().to_f64()
            } else {
                DoubleDouble::from_f64(riemann_siegel::theta(ta))
                    .rem_two_pi()
                    .to_f64()
            };
            Complex64::from_polar(1.0, -theta) * z
        }
    };
    Ok(if t < 0.0 { z.conj() } else { z })
}

/// |ζ(½+it)|², skipping the rotation by e^{−iθ} on the Riemann–Siegel path.
pub fn abs2_half_line(t: f64, target_abs_error: f64) -> Result<f64> {
    check_args(t, target_abs_error)?;
    Ok(abs2_unchecked(t.abs(), target_abs_error))
}

pub(crate) fn abs2_unchecked(t: f64, target: f64) -> f64 {
    match select_method(t, target) {
        Method::EulerMaclaurin => euler_maclaurin::zeta(t, target).norm_sqr(),
        Method::RiemannSiegel { precise } => {
            let z = riemann_siegel::z_function(t, precise);
            z * z
        }
    }
}

/// ∫₀² |ζ(½+it)|² dt, evaluated once by Gauss–Legendre quadrature on
/// Euler–Maclaurin values at full accuracy.
pub const INTEGRAL_ZERO_TO_TWO: f64 = 1.617_341_007_537_380_3;
