use rayon::prelude::*;

use crate::error::{ensure_input, LabError, Result};
use crate::sum::CompensatedSum;

/// Largest admissible grid step.
pub const MAX_GRID_STEP: f64 = 0.05;
/// Smallest admissible grid start, away from the pole at s = 1.
pub const MIN_GRID_START: f64 = 2.0;

/// Uniform samples of |ζ(½+it)|² at t = t0 + k·dt, k = 0..count.
///
/// Sample positions are always recomputed as `t0 + (k as f64) * dt`, so a
/// grid with step dt/2 reproduces the positions of the even-indexed points
/// exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaGrid {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl ZetaGrid {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        ensure_input!(
            t0.is_finite() && t0 >= MIN_GRID_START,
            "grid start t0 must be ≥ 2, got {t0}"
        );
        ensure_input!(dt.is_finite() && dt > 0.0, "grid step must be > 0, got {dt}");
        ensure_input!(!values.is_empty(), "grid must hold at least one sample");
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LabError::invalid(format!(
                "grid sample {k} is {} (|ζ|² must be finite and ≥ 0)",
                values[k]
            )));
        }
        Ok(Self { t0, dt, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn t_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_at(self.count() - 1)
    }

    /// True when [a, b] lies inside the sampled span (with a rounding slack
    /// of 1e−9 steps at either end).
    pub fn covers(&self, a: f64, b: f64) -> bool {
        let slack = 1e-9 * self.dt;
        a >= self.t0 - slack && b <= self.t_end() + slack
    }

    pub(crate) fn ensure_covers(&self, a: f64, b: f64, what: &str) -> Result<()> {
        ensure_input!(
            self.covers(a, b),
            "{what} needs |ζ|² on [{a}, {b}] but the grid spans [{}, {}]",
            self.t0,
            self.t_end()
        );
        Ok(())
    }

    /// Index of the cell containing `x` and the local coordinate in [0, 1].
    #[inline]
    pub(crate) fn locate(&self, x: f64) -> (usize, f64) {
        let u = (x - self.t0) / self.dt;
        let last = self.count() - 2;
        let i = (u.floor().max(0.0) as usize).min(last);
        let s = (u - i as f64).clamp(0.0, 1.0);
        (i, s)
    }

    /// Stencil start m and the 4 samples of the cubic used on cell i.
    #[inline]
    fn stencil(&self, i: usize) -> (isize, [f64; 4]) {
        let n = self.count();
        let m = (i as isize - 1).clamp(0, n as isize - 4) as usize;
        let v = &self.values[m..m + 4];
        (m as isize - i as isize, [v[0], v[1], v[2], v[3]])
    }

    /// Value at local coordinate s (relative to node i) of the cubic
    /// interpolant through the stencil of cell i.
    #[inline]
    fn cubic_at(offset: isize, f: &[f64; 4], s: f64) -> f64 {
        // Lagrange nodes at offset, offset+1, offset+2, offset+3.
        let x: [f64; 4] = std::array::from_fn(|j| (offset + j as isize) as f64);
        let mut acc = 0.0;
        for j in 0..4 {
            let mut l = 1.0;
            for k in 0..4 {
                if k != j {
                    l *= (s - x[k]) / (x[j] - x[k]);
                }
            }
            acc += l * f[j];
        }
        acc
    }

    /// ∫ over the part [s0, s1] of cell i of the cubic interpolant, in units
    /// of t (two-point Gauss–Legendre is exact for cubics).
    fn cell_integral(&self, i: usize, s0: f64, s1: f64) -> f64 {
        let (offset, f) = self.stencil(i);
        if s0 == 0.0 && s1 == 1.0 && offset == -1 {
            return self.dt * (13.0 * (f[1] + f[2]) - (f[0] + f[3])) / 24.0;
        }
        let half = 0.5 * (s1 - s0);
        let mid = 0.5 * (s1 + s0);
        let g = half / 3f64.sqrt();
        self.dt * half * (Self::cubic_at(offset, &f, mid - g) + Self::cubic_at(offset, &f, mid + g))
    }

    /// Interpolated |ζ(½+ix)|² inside the grid span.
    pub fn interpolate(&self, x: f64) -> f64 {
        let (i, s) = self.locate(x);
        let (offset, f) = self.stencil(i);
        Self::cubic_at(offset, &f, s)
    }

    /// ∫_a^b of the piecewise-cubic interpolant of the samples.
    ///
    /// Every cell is integrated separately, so the rule is additive over
    /// adjacent intervals up to rounding; on full interior cells it reduces
    /// to the weights (−1, 13, 13, −1)/24, a fourth-order rule.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        ensure_input!(b >= a, "integration bounds must satisfy a ≤ b, got [{a}, {b}]");
        ensure_input!(self.count() >= 4, "quadrature needs at least 4 grid samples");
        self.ensure_covers(a, b, "quadrature")?;
        if a == b {
            return Ok(0.0);
        }
        let (ia, sa) = self.locate(a);
        let (ib, sb) = self.locate(b);
        if ia == ib {
            return Ok(self.cell_integral(ia, sa, sb));
        }
        let mut acc = CompensatedSum::new();
        acc.add(self.cell_integral(ia, sa, 1.0));
        for i in ia + 1..ib {
            acc.add(self.cell_integral(i, 0.0, 1.0));
        }
        acc.add(self.cell_integral(ib, 0.0, sb));
        Ok(acc.value())
    }

    /// ∫_a^b |ζ|²(τ)·w(τ) dτ, applying the cell rule to the product.
    pub fn integrate_weighted<W: Fn(f64) -> f64>(&self, a: f64, b: f64, weight: W) -> Result<f64> {
        ensure_input!(b >= a, "integration bounds must satisfy a ≤ b, got [{a}, {b}]");
        ensure_input!(self.count() >= 4, "quadrature needs at least 4 grid samples");
        self.ensure_covers(a, b, "weighted quadrature")?;
        if a == b {
            return Ok(0.0);
        }
        let (ia, sa) = self.locate(a);
        let (ib, sb) = self.locate(b);
        let n = self.count();
        let product = |k: usize| self.values[k] * weight(self.t_at(k));
        let cell = |i: usize, s0: f64, s1: f64| -> f64 {
            let m = (i as isize - 1).clamp(0, n as isize - 4) as usize;
            let f: [f64; 4] = std::array::from_fn(|j| product(m + j));
            let offset = m as isize - i as isize;
            if s0 == 0.0 && s1 == 1.0 && offset == -1 {
                return self.dt * (13.0 * (f[1] + f[2]) - (f[0] + f[3])) / 24.0;
            }
            let half = 0.5 * (s1 - s0);
            let mid = 0.5 * (s1 + s0);
            let g = half / 3f64.sqrt();
            self.dt * half * (Self::cubic_at(offset, &f, mid - g) + Self::cubic_at(offset, &f, mid + g))
        };
        if ia == ib {
            return Ok(cell(ia, sa, sb));
        }
        let mut acc = CompensatedSum::new();
        acc.add(cell(ia, sa, 1.0));
        // Interior: the (−1, 13, 13, −1)/24 weights telescope to trapezoid
        // weights except next to the two partial cells.
        for i in ia + 1..ib {
            acc.add(cell(i, 0.0, 1.0));
        }
        acc.add(cell(ib, 0.0, sb));
        Ok(acc.value())
    }

    /// Running integral F[k] = ∫_{t0}^{t_k} of the interpolant.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.count());
        let mut acc = CompensatedSum::new();
        out.push(0.0);
        for i in 0..self.count().saturating_sub(1) {
            acc.add(self.cell_integral(i, 0.0, 1.0));
            out.push(acc.value());
        }
        out
    }

    /// ∫_{t0}^{x} given the output of [`ZetaGrid::cumulative`].
    pub fn antiderivative_at(&self, cumulative: &[f64], x: f64) -> f64 {
        let (i, s) = self.locate(x);
        cumulative[i] + self.cell_integral(i, 0.0, s)
    }

    /// Sub-grid of the samples covering [a, b], sharing sample positions
    /// with `self`.
    pub fn slice(&self, a: f64, b: f64) -> Result<ZetaGrid> {
        self.ensure_covers(a, b, "slice")?;
        let lo = ((a - self.t0) / self.dt + 1e-9).floor().max(0.0) as usize;
        let hi = (((b - self.t0) / self.dt - 1e-9).ceil() as usize).min(self.count() - 1);
        Ok(ZetaGrid {
            t0: self.t_at(lo),
            dt: self.dt,
            values: self.values[lo..=hi].to_vec(),
        })
    }
}

/// Number of grid points t0 + k·dt ≤ t1, tolerating rounding in (t1−t0)/dt.
pub(crate) fn point_count(t0: f64, t1: f64, dt: f64) -> usize {
    ((t1 - t0) / dt + 1e-7).floor() as usize + 1
}

/// Samples |ζ(½+it)|² at t0 + k·dt for all k with t0 + k·dt ≤ t1.
///
/// Points are evaluated independently (in parallel on the current rayon
/// pool) and collected in index order, so the output does not depend on the
/// number of workers.
pub fn sample_abs2_grid(t0: f64, t1: f64, dt: f64, target_abs_error: f64) -> Result<ZetaGrid> {
    sample_abs2_grid_with(t0, t1, dt, target_abs_error, |_| ())
}

/// [`sample_abs2_grid`] with a progress callback receiving the number of
/// completed chunks of 2¹⁶ points.
pub fn sample_abs2_grid_with<P: Fn(usize) + Sync>(
    t0: f64,
    t1: f64,
    dt: f64,
    target_abs_error: f64,
    progress: P,
) -> Result<ZetaGrid> {
    ensure_input!(
        t0.is_finite() && t1.is_finite() && dt.is_finite(),
        "grid parameters must be finite"
    );
    ensure_input!(t0 >= MIN_GRID_START, "grid start t0 must be ≥ 2, got {t0}");
    ensure_input!(t1 > t0, "empty grid range: need t0 < t1, got [{t0}, {t1}]");
    ensure_input!(
        dt > 0.0 && dt <= MAX_GRID_STEP,
        "grid step must satisfy 0 < dt ≤ 0.05, got {dt}"
    );
    // Validates the accuracy and the upper end of the range.
    super::abs2_half_line(t1, target_abs_error)?;
    let count = point_count(t0, t1, dt);
    const CHUNK: usize = 1 << 16;
    let values: Vec<f64> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(count);
            let chunk: Vec<f64> = (lo..hi)
                .map(|k| super::abs2_unchecked(t0 + k as f64 * dt, target_abs_error))
                .collect();
            progress(c);
            chunk
        })
        .collect();
    ZetaGrid::new(t0, dt, values)
}

/// ∫_a^b |ζ(½+it)|² dt from the samples of `grid`.
pub fn quad_abs2(grid: &ZetaGrid, a: f64, b: f64) -> Result<f64> {
    ensure_input!(a.is_finite() && b.is_finite(), "integration bounds must be finite");
    grid.integrate(a, b)
}
