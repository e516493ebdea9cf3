//! Least-squares fits of a statistic against a cubic in a logarithmic
//! regressor ℓ: y ≈ c₀ + c₁ℓ + c₂ℓ² + c₃ℓ³.

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_input, LabError, Result};

/// Fits whose column-scaled design has a larger condition number are
/// rejected as degenerate.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Number of fitted coefficients.
pub const FIT_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct LogPolyFit {
    /// ĉ₀..ĉ₃, multiplying ℓ⁰..ℓ³.
    pub coeffs: [f64; FIT_ORDER],
    /// Standard errors of the coefficients from the residual variance.
    pub std_errors: [f64; FIT_ORDER],
    /// Euclidean norm of the residual vector.
    pub residual_norm: f64,
    /// σ_max/σ_min of the column-scaled design matrix.
    pub condition: f64,
    /// Human-readable name of ℓ, e.g. `log(sqrt(T)/G)`.
    pub regressor: String,
    pub samples: usize,
}

impl LogPolyFit {
    pub fn evaluate(&self, ell: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ell + c)
    }
}

/// Fits `ys` against {1, ℓ, ℓ², ℓ³} at the regressor values `ells`.
///
/// The Vandermonde columns are scaled to unit norm before the SVD solve;
/// the coefficients are reported for the unscaled basis.
pub fn fit_log_cubic(ells: &[f64], ys: &[f64], regressor: &str) -> Result<LogPolyFit> {
    ensure_input!(
        ells.len() == ys.len(),
        "regressor and response lengths differ ({} vs {})",
        ells.len(),
        ys.len()
    );
    ensure_input!(
        ells.len() > FIT_ORDER,
        "a log-cubic fit needs at least 5 samples, got {}",
        ells.len()
    );
    ensure_input!(
        ells.iter().chain(ys).all(|v| v.is_finite()),
        "fit data must be finite"
    );
    let m = ells.len();
    let mut design = DMatrix::from_fn(m, FIT_ORDER, |i, j| ells[i].powi(j as i32));
    let scales: Vec<f64> = (0..FIT_ORDER).map(|j| design.column(j).norm()).collect();
    if scales.contains(&0.0) {
        return Err(LabError::FitDegenerate("a design column is identically zero".into()));
    }
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(LabError::FitDegenerate(format!(
            "design condition number {condition:e} exceeds {CONDITION_LIMIT:e} \
             (regressor {regressor} spans [{}, {}])",
            ells.iter().cloned().fold(f64::INFINITY, f64::min),
            ells.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        )));
    }
    let y = DVector::from_column_slice(ys);
    let scaled = svd
        .solve(&y, 0.0)
        .map_err(|e| LabError::FitDegenerate(e.to_string()))?;
    let residual = &design * &scaled - &y;
    let residual_norm = residual.norm();

    // Cov(scaled) = s² V Σ⁻² Vᵀ.
    let dof = (m - FIT_ORDER) as f64;
    let s2 = residual_norm * residual_norm / dof;
    let v_t = svd.v_t.as_ref().expect("V requested");
    let mut coeffs = [0.0; FIT_ORDER];
    let mut std_errors = [0.0; FIT_ORDER];
    for j in 0..FIT_ORDER {
        coeffs[j] = scaled[j] / scales[j];
        let var: f64 = (0..FIT_ORDER)
            .map(|k| (v_t[(k, j)] / sv[k]).powi(2))
            .sum::<f64>()
            * s2;
        std_errors[j] = var.sqrt() / scales[j];
    }
    Ok(LogPolyFit {
        coeffs,
        std_errors,
        residual_norm,
        condition,
        regressor: regressor.to_string(),
        samples: m,
    })
}

/// `count` points from `lo` to `hi` (inclusive), evenly spaced in log.
pub fn geometric_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|k| if k + 1 == count { hi } else { lo * (r * k as f64).exp() })
        .collect()
}

/// Geometric points from `lo` to `hi` with ratio close to `ratio`.
pub fn geometric_ladder(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let count = ((hi / lo).ln() / ratio.ln()).round().max(1.0) as usize + 1;
    geometric_points(lo, hi, count)
}
