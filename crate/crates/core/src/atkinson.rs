//! Atkinson's explicit formula for the mean-square error term
//!
//!   E(T) = ∫₀ᵀ |ζ(½+it)|² dt − T(log(T/2π) + 2γ − 1) = Σ₁(T) + Σ₂(T) + O(log²T),
//!
//! the direct evaluation of E(T) from a sampled grid, and Jutila's main term
//! for the mean square of Δ(x+U) − Δ(x) (or E(x+U) − E(x)).

use std::f64::consts::{FRAC_PI_4, PI};

use crate::divisor::DivisorTable;
use crate::error::{ensure_input, Result};
use crate::report::Csv;
use crate::sum::CompensatedSum;
use crate::zeta::{ZetaGrid, INTEGRAL_ZERO_TO_TWO, MIN_GRID_START};
use crate::EULER_GAMMA;

/// Largest T·n for which the phases f(T,n) are still reduced accurately
/// enough in double precision.
pub const MAX_PHASE_PRODUCT: f64 = 1e12;

/// ar sinh x = log(x + √(1+x²)), evaluated without cancellation for small
/// or negative x.
pub fn arsinh(x: f64) -> f64 {
    x.asinh()
}

/// f(T,n) = 2T·arsinh(√(πn/2T)) + √(2πnT + π²n²) − π/4.
pub fn phase_f(t: f64, n: u64) -> f64 {
    let nf = n as f64;
    2.0 * t * arsinh((PI * nf / (2.0 * t)).sqrt()) + (2.0 * PI * nf * t + PI * PI * nf * nf).sqrt()
        - FRAC_PI_4
}

/// e(T,n) without the n < T range check.
fn amplitude_unchecked(t: f64, n: u64) -> f64 {
    let x = PI * n as f64 / (2.0 * t);
    let s = x.sqrt();
    (1.0 + x).powf(-0.25) * s / arsinh(s)
}

/// e(T,n) = (1 + πn/2T)^(−1/4) · {(2T/πn)^(1/2) arsinh(√(πn/2T))}^(−1).
pub fn amplitude_e(t: f64, n: u64) -> Result<f64> {
    ensure_input!(t > 0.0 && t.is_finite(), "T must be positive, got {t}");
    ensure_input!(
        n >= 1 && (n as f64) < t,
        "e(T,n) is defined for 1 ≤ n < T, got n = {n}, T = {t}"
    );
    Ok(amplitude_unchecked(t, n))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseAmplitude {
    pub f: f64,
    pub e: f64,
    /// arsinh(√(πn/2T)).
    pub arsinh_arg: f64,
}

pub fn phase_amplitude(t: f64, n: u64) -> Result<PhaseAmplitude> {
    Ok(PhaseAmplitude {
        f: phase_f(t, n),
        e: amplitude_e(t, n)?,
        arsinh_arg: arsinh((PI * n as f64 / (2.0 * t)).sqrt()),
    })
}

/// N′ = T/2π + N/2 − (N²/4 + NT/2π)^(1/2), computed as the smaller root of
/// N′² − 2(T/2π + N/2)N′ + (T/2π)² = 0 to avoid cancellation.
pub fn n_prime(t: f64, n: f64) -> f64 {
    let a = t / (2.0 * PI);
    a * a / (a + 0.5 * n + (0.25 * n * n + n * a).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtkinsonDecomposition {
    pub t: f64,
    pub n: f64,
    pub n_prime: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub value: f64,
}

/// Σ₁(T) + Σ₂(T) with truncation N.
pub fn atkinson_e(t: f64, n: f64, table: &DivisorTable) -> Result<AtkinsonDecomposition> {
    ensure_input!(t.is_finite() && t >= 10.0, "Atkinson's formula needs T ≥ 10, got {t}");
    ensure_input!(
        n.is_finite() && (0.1 * t..=10.0 * t).contains(&n),
        "N must satisfy 0.1·T ≤ N ≤ 10·T (AT < N < A′T), got N = {n}, T = {t}"
    );
    ensure_input!(
        t * n <= MAX_PHASE_PRODUCT,
        "T·N = {:e} exceeds the phase accuracy limit 1e12",
        t * n
    );
    let np = n_prime(t, n);
    table.ensure_covers(n.max(np), "Atkinson's formula")?;

    let mut s1 = CompensatedSum::new();
    for k in 1..=n.floor() as u64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s1.add(
            sign * table.d(k as usize) as f64 * kf.powf(-0.75)
                * amplitude_unchecked(t, k)
                * phase_f(t, k).cos(),
        );
    }
    let sigma1 = 2f64.sqrt() * (t / (2.0 * PI)).powf(0.25) * s1.value();

    let mut s2 = CompensatedSum::new();
    for k in 1..=np.floor() as u64 {
        let l = (t / (2.0 * PI * k as f64)).ln();
        s2.add(table.d(k as usize) as f64 / (k as f64).sqrt() / l * (t * l - t + FRAC_PI_4).cos());
    }
    let sigma2 = -2.0 * s2.value();
    Ok(AtkinsonDecomposition {
        t,
        n,
        n_prime: np,
        sigma1,
        sigma2,
        value: sigma1 + sigma2,
    })
}

/// T(log(T/2π) + 2γ − 1).
pub fn mean_square_main(t: f64) -> f64 {
    t * ((t / (2.0 * PI)).ln() + 2.0 * EULER_GAMMA - 1.0)
}

fn ensure_starts_at_two(grid: &ZetaGrid) -> Result<()> {
    ensure_input!(
        grid.t0() == MIN_GRID_START,
        "E(T) needs a grid starting at t = 2, got t0 = {}",
        grid.t0()
    );
    Ok(())
}

/// E(T) from the sampled integrand; [0, 2] contributes a precomputed constant.
pub fn direct_e(t: f64, grid: &ZetaGrid) -> Result<f64> {
    ensure_starts_at_two(grid)?;
    ensure_input!(t.is_finite() && t >= MIN_GRID_START, "E(T) needs T ≥ 2, got {t}");
    Ok(INTEGRAL_ZERO_TO_TWO + grid.integrate(MIN_GRID_START, t)? - mean_square_main(t))
}

/// Repeated evaluation of E(x) from one pass over the grid.
pub struct ErrorTerm<'a> {
    grid: &'a ZetaGrid,
    cumulative: Vec<f64>,
}

impl<'a> ErrorTerm<'a> {
    pub fn new(grid: &'a ZetaGrid) -> Result<Self> {
        ensure_starts_at_two(grid)?;
        ensure_input!(grid.count() >= 4, "E(T) needs at least 4 grid samples");
        Ok(Self {
            grid,
            cumulative: grid.cumulative(),
        })
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        self.grid.ensure_covers(t, t, "E(T)")?;
        Ok(INTEGRAL_ZERO_TO_TWO + self.grid.antiderivative_at(&self.cumulative, t)
            - mean_square_main(t))
    }
}

/// ∫_T^{T+H} (E(x+U) − E(x))² dx by composite Simpson at the grid step.
pub fn mean_square_e_diff(t: f64, h: f64, u: f64, grid: &ZetaGrid) -> Result<f64> {
    ensure_input!(
        t.is_finite() && h.is_finite() && u.is_finite(),
        "T, H and U must be finite"
    );
    ensure_input!(h > 0.0, "H must be positive, got {h}");
    ensure_input!(u >= 0.0, "U must be ≥ 0, got {u}");
    grid.ensure_covers(t, t + h + u, "the E-difference mean square")?;
    ensure_input!(grid.count() >= 4, "quadrature needs at least 4 grid samples");
    if u == 0.0 {
        return Ok(0.0);
    }
    let cumulative = grid.cumulative();
    let diff = |x: f64| {
        let inc = grid.antiderivative_at(&cumulative, x + u) - grid.antiderivative_at(&cumulative, x);
        let d = inc - (mean_square_main(x + u) - mean_square_main(x));
        d * d
    };
    Ok(simpson(diff, t, t + h, panels_for(h, grid.dt())))
}

/// Even panel count giving a step no larger than `step`.
fn panels_for(len: f64, step: f64) -> usize {
    let m = (len / step).ceil().max(2.0) as usize;
    m + m % 2
}

/// Composite Simpson with `m` (even) panels and compensated accumulation.
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    debug_assert!(m.is_multiple_of(2) && m > 0);
    let h = (b - a) / m as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + k as f64 * h));
    }
    acc.value() * h / 3.0
}

/// Which error term Jutila's main term describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JutilaVariant {
    /// Δ(x+U) − Δ(x): prefactor 1/4π², frequency 2π.
    Divisor,
    /// E(x+U) − E(x): prefactor 1/√(2π), frequency √(2π).
    Zeta,
}

/// Minimum Simpson panels per oscillation of the inner integrand.
const PANELS_PER_OSCILLATION: f64 = 64.0;

/// (c)·Σ_{n≤T/2U} d²(n) n^(−3/2) ∫_T^{T+H} x^(1/2) |exp(iaU√(n/x)) − 1|² dx.
pub fn jutila_main_term(
    t: f64,
    h: f64,
    u: f64,
    table: &DivisorTable,
    variant: JutilaVariant,
) -> Result<f64> {
    ensure_input!(
        t.is_finite() && h.is_finite() && u.is_finite(),
        "T, H and U must be finite"
    );
    ensure_input!(t >= 1.0 && h > 0.0, "need T ≥ 1 and H > 0, got T = {t}, H = {h}");
    ensure_input!(u >= 0.0, "U must be ≥ 0, got {u}");
    if u == 0.0 {
        return Ok(0.0);
    }
    let n_max = (t / (2.0 * u)).floor();
    table.ensure_covers(n_max, "Jutila's main term")?;
    let (c, a) = match variant {
        JutilaVariant::Divisor => (1.0 / (4.0 * PI * PI), 2.0 * PI),
        JutilaVariant::Zeta => (1.0 / (2.0 * PI).sqrt(), (2.0 * PI).sqrt()),
    };
    let mut total = CompensatedSum::new();
    for n in 1..=n_max as usize {
        let nf = n as f64;
        let k = a * u * nf.sqrt();
        // |e^{iθ} − 1|² = 4 sin²(θ/2), θ = k/√x.
        let integrand = |x: f64| {
            let s = (0.5 * k / x.sqrt()).sin();
            4.0 * x.sqrt() * s * s
        };
        let sweep = k * (1.0 / t.sqrt() - 1.0 / (t + h).sqrt());
        let oscillations = (sweep / (2.0 * PI)).ceil().max(1.0);
        let m = (PANELS_PER_OSCILLATION * oscillations) as usize;
        let d = table.d(n) as f64;
        total.add(d * d * nf.powf(-1.5) * simpson(integrand, t, t + h, m));
    }
    Ok(c * total.value())
}

/// ∫_T^{T+H} (Δ(x+U) − Δ(x))² dx evaluated exactly: Δ is a step function
/// plus a smooth part, so the integral is split at every jump and each
/// smooth piece is integrated by Simpson's rule.
pub fn delta_diff_mean_square_exact(t: f64, h: f64, u: f64, table: &DivisorTable) -> Result<f64> {
    ensure_input!(t >= 1.0 && h > 0.0 && u >= 0.0, "need T ≥ 1, H > 0, U ≥ 0");
    table.ensure_covers(t + h + u, "the Δ-difference mean square")?;
    if u == 0.0 {
        return Ok(0.0);
    }
    // Breakpoints: integers in [T, T+H] and integers minus U.
    let mut cuts: Vec<f64> = Vec::new();
    let mut push_range = |lo: f64, hi: f64, shift: f64| {
        let mut k = lo.ceil();
        while k <= hi {
            cuts.push(k - shift);
            k += 1.0;
        }
    };
    push_range(t, t + h, 0.0);
    push_range(t + u, t + h + u, u);
    cuts.push(t);
    cuts.push(t + h);
    cuts.retain(|x| *x >= t && *x <= t + h);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut acc = CompensatedSum::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        // Step parts are constant on (a, b).
        let steps = table.prefix_d((mid + u) as usize) as f64 - table.prefix_d(mid as usize) as f64;
        let g = |x: f64| {
            let smooth = (x + u) * ((x + u).ln() + 2.0 * EULER_GAMMA - 1.0)
                - x * (x.ln() + 2.0 * EULER_GAMMA - 1.0);
            let v = steps - smooth;
            v * v
        };
        acc.add(simpson(g, a, b, 2));
    }
    Ok(acc.value())
}

/// CSV with header `T,N,Nprime,sigma1,sigma2,E_atkinson,E_direct,residual`.
pub fn atkinson_csv(rows: &[(AtkinsonDecomposition, f64)]) -> Csv {
    let mut csv = Csv::new(&[
        "T", "N", "Nprime", "sigma1", "sigma2", "E_atkinson", "E_direct", "residual",
    ]);
    for (a, direct) in rows {
        let residual = a.value - direct;
        csv.record(&[&a.t, &a.n, &a.n_prime, &a.sigma1, &a.sigma2, &a.value, direct, &residual]);
    }
    csv
}
