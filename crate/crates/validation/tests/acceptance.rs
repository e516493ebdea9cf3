//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zetalab_core::atkinson::{arsinh, atkinson_e, n_prime, ErrorTerm};
use zetalab_core::divisor::{divisor_sieve, fit_d2_main_term};
use zetalab_core::experiments::{
    default_delta_step, default_i1_step, experiments_csv, fit_delta_ladder, fit_theorem1,
    meansq_delta_diff, meansq_i1_long, meansq_i1_short, theorem1_ladder, DELTA_THETAS,
    THEOREM1_THETAS,
};
use zetalab_core::fit::geometric_ladder;
use zetalab_core::smoothed::{gaussian_closed_form, i1_direct, i1_explicit_diff, sin2_weight_integral};
use zetalab_core::zeta::{decode_grid, encode_grid, sample_abs2_grid};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// |E_Atkinson(T, N=T) − E_direct(T)| ≤ 10·log²T for ≥ 90% of 50 log-uniform T.
fn atkinson_cross_validation() -> Outcome {
    let grid = common::small_grid();
    let e = ErrorTerm::new(&grid).unwrap();
    let table = divisor_sieve(10_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut within = 0;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = (rng.gen_range(500f64.ln()..1e4f64.ln())).exp();
        let residual = atkinson_e(t, t, &table).unwrap().value - e.at(t).unwrap();
        let scaled = residual.abs() / t.ln().powi(2);
        worst = worst.max(scaled);
        if scaled <= 10.0 {
            within += 1;
        }
    }
    outcome(
        within >= 45,
        format!("{within}/50 within 10·log²T (need 45); max |residual|/log²T = {worst:.3}"),
    )
}

/// d̂₃ of the D₂(x)/x fit over [10⁴, 10⁷] within 15% of 1/(2π²).
fn d2_leading_coefficient() -> Outcome {
    let table = divisor_sieve(10_000_000).unwrap();
    let xs = geometric_ladder(1e4, 1e7, 1.5);
    let fit = fit_d2_main_term(&xs, &table).unwrap();
    let target = 1.0 / (2.0 * PI * PI);
    let rel = fit.coeffs[3] / target - 1.0;
    outcome(
        rel.abs() <= 0.15,
        format!(
            "d̂₃ = {:.6} ± {:.6} over {} points; target {target:.7}, relative error {rel:+.3} (1/π² = {:.6})",
            fit.coeffs[3],
            fit.std_errors[3],
            xs.len(),
            1.0 / (PI * PI)
        ),
    )
}

/// ĉ₃ of the Δ-difference ladder at T = 10⁶ within 25% of 8/π².
fn delta_leading_coefficient() -> Outcome {
    let t: f64 = 1e6;
    let table = divisor_sieve(2_100_000).unwrap();
    let results: Vec<_> = DELTA_THETAS
        .iter()
        .map(|th| {
            let u = t.powf(*th);
            meansq_delta_diff(t, u, &table, default_delta_step(u)).unwrap()
        })
        .collect();
    let fit = fit_delta_ladder(&results).unwrap();
    let target = 8.0 / (PI * PI);
    let rel = fit.coeffs[3] / target - 1.0;
    let norm: Vec<String> =
        results.iter().map(|r| format!("{:.3}", r.records[0].normalized)).collect();
    outcome(
        rel.abs() <= 0.25,
        format!(
            "ĉ₃ = {:.4} ± {:.4} (condition {:.1e}); target {target:.5}, relative error {rel:+.3}; normalized [{}]",
            fit.coeffs[3],
            fit.std_errors[3],
            fit.condition,
            norm.join(", ")
        ),
    )
}

/// corr(explicit, direct difference) ≥ 0.99 and residual sd ≤ 5 over 200 t.
fn explicit_formula_consistency() -> Outcome {
    let grid = common::large_grid();
    let table = divisor_sieve(100_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut explicit, mut direct) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let t: f64 = rng.gen_range(1e5..2e5);
        let g = t.powf(0.35);
        explicit.push(i1_explicit_diff(t, g, &table).unwrap().value);
        direct.push(i1_direct(t + g, g, &grid).unwrap().value - i1_direct(t, g, &grid).unwrap().value);
    }
    let residual: Vec<f64> = explicit.iter().zip(&direct).map(|(a, b)| a - b).collect();
    let corr = common::correlation(&explicit, &direct);
    let sd = common::sample_sd(&residual);
    outcome(
        corr >= 0.99 && sd <= 5.0,
        format!(
            "corr = {corr:.5}, residual sd = {sd:.3}, residual mean = {:.3}",
            common::mean(&residual)
        ),
    )
}

/// â₃ > 0 and the normalized long-interval statistic stable within ×4.
fn theorem1_desk_scale() -> Outcome {
    let grid = common::large_grid();
    let results: Vec<_> = theorem1_ladder(1e4, 1e5, 5, &THEOREM1_THETAS)
        .into_iter()
        .map(|(t, g)| meansq_i1_long(t, g, &grid, default_i1_step(g)).unwrap())
        .collect();
    let fit = fit_theorem1(&results).unwrap();
    let norm: Vec<f64> = results.iter().map(|r| r.records[0].normalized).collect();
    let ratio = spread(&norm);
    outcome(
        fit.coeffs[3] > 0.0 && ratio <= 4.0,
        format!(
            "â₃ = {:.4} ± {:.4} over {} pairs; normalized spread {ratio:.3} (range {:.3}..{:.3})",
            fit.coeffs[3],
            fit.std_errors[3],
            norm.len(),
            norm.iter().cloned().fold(f64::INFINITY, f64::min),
            norm.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        ),
    )
}

/// Short-interval normalized statistic stable within ×4 across T.
fn short_interval_order() -> Outcome {
    let grid = common::large_grid();
    let norm: Vec<f64> = [1e4f64, 3e4, 1e5]
        .iter()
        .map(|&t| {
            let (u, g, h) = (t.powf(1.0 / 3.0), t.powf(4.0 / 9.0), t.powf(8.0 / 9.0));
            meansq_i1_short(t, h, u, g, &grid, default_i1_step(g)).unwrap().records[0].normalized
        })
        .collect();
    let ratio = spread(&norm);
    outcome(
        ratio <= 4.0,
        format!(
            "normalized {:.3}, {:.3}, {:.3} at T = 1e4, 3e4, 1e5; spread {ratio:.3}",
            norm[0], norm[1], norm[2]
        ),
    )
}

/// Gaussian closed form vs quadrature, and the sin² weight integral.
fn closed_form_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let b = Complex64::new(rng.gen_range(0.5..5.0), rng.gen_range(-3.0..3.0));
        let r = 12.0 / b.re.sqrt() + (a.re / (2.0 * b.re)).abs();
        let quad = common::integrate_complex(|x| (a * x - b * x * x).exp(), -r, r, 1e-13);
        worst = worst.max((gaussian_closed_form(a, b).unwrap() - quad).norm());
    }
    let quad = common::integrate(|y| (-2.0 * y * y).exp() * y.sin().powi(2), 0.0, 8.0, 1e-15);
    let sin2_gap = (sin2_weight_integral() - quad).abs();
    outcome(
        worst <= 1e-10 && sin2_gap <= 1e-12,
        format!("max Gaussian gap {worst:.2e}; sin² integral gap {sin2_gap:.2e}"),
    )
}

/// Identities, exact arithmetic and byte-level reproducibility.
fn invariant_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let sine_ok = (0..10_000).all(|_| {
        let (a, b): (f64, f64) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let lhs = (a.sin() - b.sin()).powi(2);
        let rhs = (2.0 + 2.0 * (a + b).cos()) * (0.5 * (a - b)).sin().powi(2);
        (lhs - rhs).abs() <= 1e-12
    });
    if !sine_ok {
        failures.push("sine identity");
    }

    let arsinh_ok = (arsinh(1.0) - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15
        && (0..1000).all(|_| {
            let x: f64 = rng.gen_range(-100.0..100.0);
            arsinh(-x) == -arsinh(x)
        });
    if !arsinh_ok {
        failures.push("arsinh");
    }

    let n_prime_ok = (0..1000).all(|_| {
        let t: f64 = rng.gen_range(10.0..1e6);
        let n = t * rng.gen_range(0.1..10.0);
        let a = t / (2.0 * PI);
        let p = n_prime(t, n);
        (p * p - 2.0 * (a + 0.5 * n) * p + a * a).abs() <= 1e-12 * a * a
    });
    if !n_prime_ok {
        failures.push("N′ quadratic");
    }

    let table = divisor_sieve(10_000).unwrap();
    if !(1..=10_000u64).all(|n| table.d(n as usize) == common::divisors_brute(n)) {
        failures.push("sieve vs enumeration");
    }

    let grid = sample_abs2_grid(1000.0, 1010.0, 0.01, 1e-8).unwrap();
    let bytes = encode_grid(&grid);
    let back = decode_grid(&bytes, Path::new("memory")).unwrap();
    let same = back.t0().to_bits() == grid.t0().to_bits()
        && back.dt().to_bits() == grid.dt().to_bits()
        && back.values().iter().zip(grid.values()).all(|(a, b)| a.to_bits() == b.to_bits())
        && encode_grid(&back) == bytes;
    if !same {
        failures.push("grid round trip");
    }

    let again = sample_abs2_grid(1000.0, 1010.0, 0.01, 1e-8).unwrap();
    let large = common::large_grid();
    let run = || {
        let t: f64 = 1e4;
        let (u, g, h) = (t.powf(1.0 / 3.0), t.powf(4.0 / 9.0), t.powf(8.0 / 9.0));
        experiments_csv(&[meansq_i1_short(t, h, u, g, &large, default_i1_step(g)).unwrap()])
    };
    if encode_grid(&again) != bytes || run().as_str() != run().as_str() {
        failures.push("deterministic rerun");
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "sine identity, arsinh, N′ quadratic, sieve, grid round trip, rerun identity".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("Atkinson cross-validation", atkinson_cross_validation),
        ("d² summatory leading coefficient", d2_leading_coefficient),
        ("Δ-difference leading coefficient", delta_leading_coefficient),
        ("explicit formula for I₁ differences", explicit_formula_consistency),
        ("long-interval I₁ mean square", theorem1_desk_scale),
        ("short-interval I₁ mean square", short_interval_order),
        ("closed-form oracles", closed_form_oracles),
        ("invariant suites", invariant_suites),
    ];
    // Sample the shared grids before timing individual criteria.
    common::small_grid();
    common::large_grid();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {verdict} — {name}: {} [{:.1} s]",
            k + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
