//! Shared reference implementations for the integration tests.
//!
//! Everything here is written independently of the library: a small
//! double-double type with its own logarithm, an Euler–Maclaurin ζ with
//! hard-coded Bernoulli numbers, an adaptive Gauss–Kronrod integrator and
//! brute-force divisor counting.

#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use zetalab_core::zeta::{read_grid, sample_abs2_grid, write_grid, ZetaGrid};

// ---------------------------------------------------------------------------
// double-double

#[derive(Clone, Copy, Debug)]
pub struct Dd(pub f64, pub f64);

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd(x, 0.0)
    }
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.0, o.0);
        let e = e + self.1 + o.1;
        let (hi, lo) = two_sum(s, e);
        Dd(hi, lo)
    }
    pub fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.0, o.0);
        let e = e + self.0 * o.1 + self.1 * o.0;
        let (hi, lo) = two_sum(p, e);
        Dd(hi, lo)
    }
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.0 / o.0;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.0 / o.0;
        Dd::new(q1).add(Dd::new(q2)).add(Dd::new(q3))
    }
    pub fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}

pub const DD_LN2: Dd = Dd(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
pub const DD_2PI: Dd = Dd(std::f64::consts::TAU, 2.449_293_598_294_706_4e-16);

/// ln(n) in double-double: n = 2^k·m with m ∈ [¾, 3/2), then
/// ln m = 2·atanh((m−1)/(m+1)) by its power series.
pub fn dd_ln(n: u64) -> Dd {
    let mut k = 0i32;
    let mut m = n as f64;
    while m >= 1.5 {
        m /= 2.0;
        k += 1;
    }
    // m is exact (division by powers of two).
    let z = Dd::new(m - 1.0).div(Dd::new(m + 1.0));
    let z2 = z.mul(z);
    let mut term = z;
    let mut sum = z;
    for j in 1..40 {
        term = term.mul(z2);
        let c = term.div(Dd::new((2 * j + 1) as f64));
        sum = sum.add(c);
        if c.0.abs() < 1e-34 {
            break;
        }
    }
    sum.add(sum).add(DD_LN2.mul(Dd::new(k as f64)))
}

/// x mod 2π reduced to [−π, π] in double-double, returned as f64.
pub fn dd_reduce(x: Dd) -> f64 {
    let k = (x.0 / DD_2PI.0).round();
    x.sub(DD_2PI.mul(Dd::new(k))).to_f64()
}

// ---------------------------------------------------------------------------
// ζ oracle

/// B_{2k} for k = 1..=15.
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174_611.0, 330.0),
    (854_513.0, 138.0),
    (-236_364_091.0, 2730.0),
    (8_553_103.0, 6.0),
    (-23_749_461_029.0, 870.0),
    (8_615_841_276_005.0, 14322.0),
];

/// n^(−½−it) with the phase t·ln n in double-double.
fn oracle_power(n: u64, t: f64) -> Complex64 {
    let phase = dd_reduce(dd_ln(n).mul(Dd::new(t)));
    Complex64::from_polar(1.0 / (n as f64).sqrt(), -phase)
}

/// ζ(½+it), t ≥ 0, by Euler–Maclaurin with N = ⌈t/2⌉ + 30 and fifteen
/// Bernoulli corrections; partial sums are accumulated in double-double.
pub fn zeta_oracle(t: f64) -> Complex64 {
    let n = (t / 2.0).ceil() as u64 + 30;
    let (mut re, mut im) = (Dd::new(0.0), Dd::new(0.0));
    for k in 1..n {
        let v = oracle_power(k, t);
        re = re.add(Dd::new(v.re));
        im = im.add(Dd::new(v.im));
    }
    let s = Complex64::new(0.5, t);
    let nf = n as f64;
    let np = oracle_power(n, t);
    let mut tail = np * nf / (s - 1.0) + np * 0.5;
    let mut rising = s;
    let mut fact = 2.0; // (2k)!
    let mut npow = 1.0 / nf; // N^{−2k+1}
    for (k, (num, den)) in BERNOULLI.iter().enumerate() {
        let k1 = (k + 1) as f64;
        tail += np * rising * (num / den / fact * npow);
        rising = rising * (s + 2.0 * k1 - 1.0) * (s + 2.0 * k1);
        fact *= (2.0 * k1 + 1.0) * (2.0 * k1 + 2.0);
        npow /= nf * nf;
    }
    Complex64::new(re.to_f64() + tail.re, im.to_f64() + tail.im)
}

// ---------------------------------------------------------------------------
// adaptive Gauss–Kronrod (7/15)

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

fn adapt<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let (v, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// ∫_a^b f with absolute tolerance `tol`.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    adapt(&f, a, b, tol, 40)
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

// ---------------------------------------------------------------------------
// divisors and statistics

pub fn divisors_brute(n: u64) -> u32 {
    let mut count = 0;
    let mut k = 1;
    while k * k <= n {
        if n.is_multiple_of(k) {
            count += if k * k == n { 1 } else { 2 };
        }
        k += 1;
    }
    count
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

// ---------------------------------------------------------------------------
// grids shared between test binaries

/// Grid from t = 2 covering every direct E(T) evaluation.
pub const SMALL_SPAN: (f64, f64) = (2.0, 20_050.0);
/// Grid covering every smoothed-moment experiment in [10⁴, 2·10⁵].
pub const LARGE_SPAN: (f64, f64) = (9_000.0, 205_000.0);
pub const GRID_DT: f64 = 0.01;
pub const GRID_ACCURACY: f64 = 1e-7;

fn cache_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Loads a grid from the shared test cache, sampling it on first use. An
/// exclusive lock on a side file serialises concurrent test binaries.
fn cached(name: &str, span: (f64, f64)) -> ZetaGrid {
    let path = cache_path(&format!("{name}.zgrid"));
    let lock = File::create(cache_path(&format!("{name}.lock"))).expect("lock file");
    lock.lock().expect("lock");
    if let Ok(g) = read_grid(&path) {
        if g.t0() == span.0 && g.dt() == GRID_DT && g.t_end() >= span.1 - GRID_DT {
            return g;
        }
    }
    let g = sample_abs2_grid(span.0, span.1, GRID_DT, GRID_ACCURACY).expect("sampling");
    write_grid(&path, &g).expect("writing cache");
    g
}

pub fn small_grid() -> Arc<ZetaGrid> {
    static G: OnceLock<Arc<ZetaGrid>> = OnceLock::new();
    Arc::clone(G.get_or_init(|| Arc::new(cached("small", SMALL_SPAN))))
}

pub fn large_grid() -> Arc<ZetaGrid> {
    static G: OnceLock<Arc<ZetaGrid>> = OnceLock::new();
    Arc::clone(G.get_or_init(|| Arc::new(cached("large", LARGE_SPAN))))
}
