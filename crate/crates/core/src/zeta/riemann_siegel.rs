//! Riemann–Siegel evaluation of Hardy's Z-function with the correction
//! terms C₀..C₄.
//!
//! The C_k are linear combinations of derivatives of
//! Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp). Their Taylor coefficients about
//! p = ½ are generated once from a Cauchy integral of Ψ over a circle of
//! radius 1 (Ψ is entire, and |Ψ| stays small on that circle), which avoids the removable 0/0 points of the quotient on the
//! real line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::ddouble::DoubleDouble;

/// Number of Taylor coefficients kept for each C_k.
const SERIES_LEN: usize = 56;
/// Highest derivative of Ψ entering C₄.
const MAX_DERIV: usize = 12;
const CAUCHY_RADIUS: f64 = 1.0;
const CAUCHY_POINTS: usize = 256;

/// Bound for the remainder after C₄, |R| ≤ K·t^(−11/4). Against a
/// double-double Euler–Maclaurin reference the largest observed ratio on
/// [50, 3000] is 0.0124 (near t = 52); K keeps a factor 4 of headroom.
const REMAINDER_CONSTANT: f64 = 0.05;

struct CorrectionSeries {
    /// `coeffs[k][j]` multiplies (p − ½)^j in C_k(p).
    coeffs: [Vec<f64>; 5],
}

fn psi_shifted(x: Complex64) -> Complex64 {
    // Ψ(½ + x) = −cos(2πx² − 5π/8) / cos(2πx)
    let num = (x * x * (2.0 * PI) - 5.0 * PI / 8.0).cos();
    let den = (x * (2.0 * PI)).cos();
    -num / den
}

fn psi_taylor() -> Vec<f64> {
    let n = SERIES_LEN + MAX_DERIV;
    let samples: Vec<Complex64> = (0..CAUCHY_POINTS)
        .map(|j| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / CAUCHY_POINTS as f64);
            psi_shifted(w * CAUCHY_RADIUS)
        })
        .collect();
    (0..n)
        .map(|k| {
            if k % 2 == 1 {
                // Ψ(½ + x) is even in x.
                return 0.0;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let angle = -2.0 * PI * ((j * k) % CAUCHY_POINTS) as f64 / CAUCHY_POINTS as f64;
                acc += s * Complex64::from_polar(1.0, angle);
            }
            acc.re / CAUCHY_POINTS as f64 / CAUCHY_RADIUS.powi(k as i32)
        })
        .collect()
}

impl CorrectionSeries {
    fn build() -> Self {
        let a = psi_taylor();
        // d(m)[j]: coefficient of x^j in Ψ^(m)(½ + x).
        let deriv = |m: usize| -> Vec<f64> {
            (0..SERIES_LEN)
                .map(|j| {
                    let falling: f64 = ((j + 1)..=(j + m)).map(|i| i as f64).product();
                    a[j + m] * falling
                })
                .collect()
        };
        let d: Vec<Vec<f64>> = (0..=MAX_DERIV).map(deriv).collect();
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        let pi6 = pi4 * pi2;
        let pi8 = pi4 * pi4;
        let combine = |terms: &[(f64, usize)]| -> Vec<f64> {
            (0..SERIES_LEN)
                .map(|j| terms.iter().map(|&(c, m)| c * d[m][j]).sum())
                .collect()
        };
        let c0 = combine(&[(1.0, 0)]);
        let c1 = combine(&[(-1.0 / (96.0 * pi2), 3)]);
        let c2 = combine(&[(1.0 / (18432.0 * pi4), 6), (1.0 / (64.0 * pi2), 2)]);
        let c3 = combine(&[
            (-1.0 / (5_308_416.0 * pi6), 9),
            (-1.0 / (3840.0 * pi4), 5),
            (-1.0 / (64.0 * pi2), 1),
        ]);
        let c4 = combine(&[
            (1.0 / (2_038_431_744.0 * pi8), 12),
            (11.0 / (5_898_240.0 * pi6), 8),
            (19.0 / (24576.0 * pi4), 4),
            (1.0 / (128.0 * pi2), 0),
        ]);
        Self {
            coeffs: [c0, c1, c2, c3, c4],
        }
    }

    fn eval(&self, k: usize, x: f64) -> f64 {
        self.coeffs[k].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

fn series() -> &'static CorrectionSeries {
    static SERIES: OnceLock<CorrectionSeries> = OnceLock::new();
    SERIES.get_or_init(CorrectionSeries::build)
}

/// C_k(p) for k = 0..=4 and 0 ≤ p ≤ 1.
pub fn correction_term(k: usize, p: f64) -> f64 {
    series().eval(k, p - 0.5)
}

/// Tables of ln n (double-double and f64) and n^(−½) for the main sum.
struct MainSumTables {
    ln_dd: Vec<DoubleDouble>,
    ln: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

/// Covers t up to about 2π·2000² ≈ 2.5·10⁷.
const TABLE_LEN: usize = 2000;

fn tables() -> &'static MainSumTables {
    static TABLES: OnceLock<MainSumTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let ln_dd: Vec<DoubleDouble> = (0..=TABLE_LEN)
            .map(|n| {
                if n == 0 {
                    DoubleDouble::ZERO
                } else {
                    DoubleDouble::from_f64(n as f64).ln()
                }
            })
            .collect();
        let ln = ln_dd.iter().map(|v| v.to_f64()).collect();
        let inv_sqrt = (0..=TABLE_LEN)
            .map(|n| if n == 0 { 0.0 } else { 1.0 / (n as f64).sqrt() })
            .collect();
        MainSumTables {
            ln_dd,
            ln,
            inv_sqrt,
        }
    })
}

pub(crate) fn ln_dd(n: usize) -> DoubleDouble {
    if n <= TABLE_LEN {
        tables().ln_dd[n]
    } else {
        DoubleDouble::from_f64(n as f64).ln()
    }
}

/// Asymptotic tail of θ(t) after the leading terms.
fn theta_tail(t: f64) -> f64 {
    let r = 1.0 / t;
    let r2 = r * r;
    r * (1.0 / 48.0
        + r2 * (7.0 / 5760.0
            + r2 * (31.0 / 80640.0 + r2 * (127.0 / 430_080.0 + r2 * 511.0 / 1_216_512.0))))
}

/// Riemann–Siegel theta function θ(t) in plain double precision.
pub fn theta(t: f64) -> f64 {
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + theta_tail(t)
}

/// θ(t) to double-double accuracy (valid for t ≳ 10).
pub fn theta_dd(t: f64) -> DoubleDouble {
    let td = DoubleDouble::from_f64(t);
    let log_term = (td / DoubleDouble::TWO_PI).ln();
    let half_t = td.ldexp(-1);
    half_t * log_term - half_t - DoubleDouble::PI.ldexp(-3) + DoubleDouble::from_f64(theta_tail(t))
}

/// Largest t the main-sum tables support.
pub fn max_t() -> f64 {
    2.0 * PI * (TABLE_LEN as f64).powi(2)
}

/// Upper bound on the truncation error of the corrected formula.
pub fn remainder_bound(t: f64) -> f64 {
    REMAINDER_CONSTANT * t.powf(-2.75)
}

/// Rounding error estimate of the plain f64 main sum: every phase
/// θ − t·ln n carries an absolute error of about one ulp of its magnitude,
/// and the √a-term sum accumulates those errors.
pub fn rounding_bound(t: f64) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let phase_mag = theta(t).abs() + t * a.ln().max(1.0);
    2.0 * f64::EPSILON * phase_mag * a.sqrt()
}

/// Hardy's Z(t), with phases reduced in double-double when `precise`.
pub fn z_function(t: f64, precise: bool) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let tab = tables();
    let mut main = crate::sum::CompensatedSum::new();
    if precise {
        let th = theta_dd(t);
        for k in 1..=n {
            let phase = (th - ln_dd(k).mul_f64(t)).rem_two_pi().to_f64();
            main.add(tab.inv_sqrt[k] * phase.cos());
        }
    } else {
        let th = theta(t);
        for k in 1..=n {
            main.add(tab.inv_sqrt[k] * (th - t * tab.ln[k]).cos());
        }
    }
    let s = series();
    let x = p - 0.5;
    let r = 1.0 / a;
    let corr = (0..5).rev().fold(0.0, |acc, k| acc * r + s.eval(k, x));
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * main.value() + sign * corr / a.sqrt()
}
