//! Euler–Maclaurin summation for ζ(½+it).
//!
//! ζ(s) = Σ_{n<N} n^{−s} + N^{1−s}/(s−1) + N^{−s}/2
//!        + Σ_{k≥1} B_{2k}/(2k)! · s(s+1)⋯(s+2k−2) · N^{−s−2k+1}.
//!
//! N is chosen so that consecutive correction terms shrink by at least a
//! factor of four, and the correction series is cut once a term drops below
//! the requested accuracy.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::riemann_siegel::ln_dd;
use crate::sum::CompensatedSum;

const MAX_CORRECTIONS: usize = 40;

/// B_{2k}/(2k)! = (−1)^{k+1} · 2ζ(2k)/(2π)^{2k}, for k = 1..=MAX_CORRECTIONS.
fn bernoulli_ratios() -> &'static [f64] {
    static RATIOS: OnceLock<Vec<f64>> = OnceLock::new();
    RATIOS.get_or_init(|| {
        (1..=MAX_CORRECTIONS)
            .map(|k| {
                let z = zeta_even(2 * k as i32);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * z / (2.0 * PI).powi(2 * k as i32)
            })
            .collect()
    })
}

/// ζ(m) for even m ≥ 2.
fn zeta_even(m: i32) -> f64 {
    if m == 2 {
        return PI * PI / 6.0;
    }
    // Direct head plus a short Euler–Maclaurin tail at K = 24.
    let k = 24.0_f64;
    let head: f64 = (1..24).rev().map(|n| (n as f64).powi(-m)).sum();
    let mf = m as f64;
    let rising = |len: i32| (0..len).map(|i| mf + i as f64).product::<f64>();
    let tail = k.powf(1.0 - mf) / (mf - 1.0) + 0.5 * k.powi(-m) + rising(1) / 12.0 * k.powi(-m - 1)
        - rising(3) / 720.0 * k.powi(-m - 3)
        + rising(5) / 30240.0 * k.powi(-m - 5)
        - rising(7) / 1_209_600.0 * k.powi(-m - 7);
    head + tail
}

/// n^(−½−it) with the phase t·ln n reduced in double-double.
fn power_half_line(n: usize, t: f64) -> Complex64 {
    let phase = ln_dd(n).mul_f64(t).rem_two_pi().to_f64();
    Complex64::from_polar(1.0 / (n as f64).sqrt(), -phase)
}

/// ζ(½+it) with absolute error well below `target`.
pub fn zeta(t: f64, target: f64) -> Complex64 {
    let n_cut = ((t.abs() + 2.0 * MAX_CORRECTIONS as f64 + 1.0) / PI).ceil() as usize;
    let n_cut = n_cut.max(8);
    let s = Complex64::new(0.5, t);

    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for n in 1..n_cut {
        let v = power_half_line(n, t);
        re.add(v.re);
        im.add(v.im);
    }
    let nf = n_cut as f64;
    let n_pow = power_half_line(n_cut, t); // N^{−s}
    let boundary = n_pow * nf / (s - 1.0) + n_pow * 0.5;
    re.add(boundary.re);
    im.add(boundary.im);

    let ratios = bernoulli_ratios();
    // rising = s(s+1)⋯(s+2k−2), scale = N^{−2k+1}
    let mut rising = s;
    let mut scale = 1.0 / nf;
    for (k, &b) in ratios.iter().enumerate() {
        let term = n_pow * rising * (b * scale);
        re.add(term.re);
        im.add(term.im);
        if term.norm() < 1e-3 * target {
            break;
        }
        let j = 2.0 * (k + 1) as f64;
        rising = rising * (s + (j - 1.0)) * (s + j);
        scale /= nf * nf;
    }
    Complex64::new(re.value(), im.value())
}
