//! Mean-square experiments for the differences of I₁(·,G) and Δ, the
//! log-cubic fits of their main terms, and remainder budgets.

use rayon::prelude::*;

use crate::divisor::DivisorTable;
use crate::error::{ensure_input, Result};
use crate::fit::{fit_log_cubic, geometric_points, LogPolyFit};
use crate::report::Csv;
use crate::smoothed::{explicit_truncation, i1_explicit_diff, Smoother};
use crate::sum::CompensatedSum;
use crate::zeta::ZetaGrid;
use crate::RANGE_EPSILON;

/// Remainder-to-main ratios above this are flagged as non-asymptotic.
pub const BUDGET_FLAG_RATIO: f64 = 0.1;

/// Smoothing exponents θ in G = T^θ for the long-interval ladder.
pub const THEOREM1_THETAS: [f64; 4] = [0.25, 0.30, 0.35, 0.40];

/// Shift exponents θ in U = T^θ for the Δ ladder.
pub const DELTA_THETAS: [f64; 5] = [0.20, 0.25, 0.30, 0.35, 0.40];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub t: f64,
    /// Smoothing width; 0 where the experiment has none.
    pub g: f64,
    pub u: f64,
    pub h: f64,
    pub step: f64,
    pub statistic: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub id: String,
    pub records: Vec<ExperimentRecord>,
    pub fit: Option<LogPolyFit>,
    /// Range-validator findings and error-budget notes.
    pub notes: Vec<String>,
}

impl ExperimentResult {
    fn single(id: &str, record: ExperimentRecord, notes: Vec<String>) -> Self {
        Self {
            id: id.to_string(),
            records: vec![record],
            fit: None,
            notes,
        }
    }

    /// Concatenates results into one labelled result.
    pub fn merge(id: &str, parts: &[ExperimentResult]) -> Self {
        Self {
            id: id.to_string(),
            records: parts.iter().flat_map(|p| p.records.iter().copied()).collect(),
            fit: None,
            notes: parts.iter().flat_map(|p| p.notes.iter().cloned()).collect(),
        }
    }
}

/// log(√T/X), the regressor of every mean-square experiment.
pub fn log_ratio(t: f64, x: f64) -> f64 {
    (t.sqrt() / x).ln()
}

/// Largest multiple of dt not above `step` (at least dt), so that all
/// sample points share their offset relative to the grid.
fn aligned_step(step: f64, dt: f64) -> f64 {
    dt * (step / dt).floor().max(1.0)
}

/// Left Riemann sum of f² over [a, a+len] with step h: full steps plus one
/// partial step at the end.
fn riemann_square<F>(a: f64, len: f64, h: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let n = (len / h + 1e-9).floor() as usize;
    let tail = len - n as f64 * h;
    let count = if tail > 1e-9 * h { n + 1 } else { n };
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|k| f(a + k as f64 * h))
        .collect::<Result<_>>()?;
    let mut acc = CompensatedSum::new();
    for (k, v) in values.iter().enumerate() {
        let w = if k < n { h } else { tail };
        acc.add(w * v * v);
    }
    Ok(acc.value())
}

fn check_theorem1_range(t: f64, g: f64) -> Result<()> {
    ensure_input!(t.is_finite() && t >= 100.0, "T must be ≥ 100, got {t}");
    ensure_input!(
        g.is_finite() && g >= t.powf(RANGE_EPSILON) && g <= 0.5 * t.sqrt(),
        "G must satisfy T^0.05 ≤ G ≤ ½√T (long-interval range), got G = {g} at T = {t}"
    );
    Ok(())
}

/// ∫_T^{2T} (I₁(t+G,G) − I₁(t,G))² dt, normalized by T·G·log³(√T/G).
pub fn meansq_i1_long(t: f64, g: f64, grid: &ZetaGrid, step: f64) -> Result<ExperimentResult> {
    check_theorem1_range(t, g)?;
    ensure_input!(
        step.is_finite() && step > 0.0 && step <= 0.25 * g,
        "step must satisfy 0 < step ≤ G/4, got {step} with G = {g}"
    );
    let l = (2.0 * t + g).ln();
    grid.ensure_covers(t - g * l, 2.0 * t + g + g * l, "the long-interval I₁ mean square")?;
    let h = aligned_step(step, grid.dt());
    let smoother = Smoother::new(grid, g, l)?;
    let statistic = riemann_square(t, t, h, |x| Ok(smoother.value(x + g)? - smoother.value(x)?))?;
    let ell = log_ratio(t, g);
    let record = ExperimentRecord {
        t,
        g,
        u: g,
        h: t,
        step: h,
        statistic,
        normalized: statistic / (t * g * ell.powi(3)),
    };
    let mut notes = Vec::new();
    if g > t.powf(0.5 - RANGE_EPSILON) {
        notes.push(format!(
            "T = {t}, G = {g}: G > T^(1/2−ε), outside the range of a true asymptotic formula"
        ));
    }
    let budget = budget_entry(t, g, 1.0);
    if budget.ratio >= 1.0 {
        notes.push(format!(
            "T = {t}, G = {g}: remainder/main = {:.3}, the remainder is comparable to the main term",
            budget.ratio
        ));
    }
    Ok(ExperimentResult::single("meansq_i1_long", record, notes))
}

/// [`meansq_i1_long`] with every difference taken from the explicit
/// divisor-sum formula instead of quadrature.
pub fn meansq_i1_long_explicit(
    t: f64,
    g: f64,
    table: &DivisorTable,
    step: f64,
) -> Result<ExperimentResult> {
    check_theorem1_range(t, g)?;
    ensure_input!(
        step.is_finite() && step > 0.0 && step <= 0.25 * g,
        "step must satisfy 0 < step ≤ G/4, got {step} with G = {g}"
    );
    table.ensure_covers(explicit_truncation(2.0 * t, g) as f64, "the explicit I₁ formula")?;
    let statistic = riemann_square(t, t, step, |x| Ok(i1_explicit_diff(x, g, table)?.value))?;
    let ell = log_ratio(t, g);
    let record = ExperimentRecord {
        t,
        g,
        u: g,
        h: t,
        step,
        statistic,
        normalized: statistic / (t * g * ell.powi(3)),
    };
    Ok(ExperimentResult::single("meansq_i1_long_explicit", record, Vec::new()))
}

/// Violations of T^ε ≤ U ≤ G ≤ ½√T, T^ε ≤ H ≤ T, HU ≥ T^(1+ε).
pub fn short_interval_violations(t: f64, h: f64, u: f64, g: f64) -> Vec<String> {
    let te = t.powf(RANGE_EPSILON);
    let mut out = Vec::new();
    if u < te {
        out.push(format!("U = {u} < T^ε = {te}"));
    }
    if u > g {
        out.push(format!("U = {u} > G = {g}"));
    }
    if g > 0.5 * t.sqrt() {
        out.push(format!("G = {g} > ½√T = {}", 0.5 * t.sqrt()));
    }
    if h < te || h > t {
        out.push(format!("H = {h} outside [T^ε, T] = [{te}, {t}]"));
    }
    if h * u < t.powf(1.0 + RANGE_EPSILON) {
        out.push(format!(
            "H·U = {} < T^(1+ε) = {}",
            h * u,
            t.powf(1.0 + RANGE_EPSILON)
        ));
    }
    out
}

/// J(T;G,H,U) = ∫_T^{T+H} (I₁(t+U,G) − I₁(t,G))² dt, normalized by
/// (H·U²/G)·log³(√T/G).
pub fn meansq_i1_short(
    t: f64,
    h: f64,
    u: f64,
    g: f64,
    grid: &ZetaGrid,
    step: f64,
) -> Result<ExperimentResult> {
    ensure_input!(
        [t, h, u, g, step].iter().all(|v| v.is_finite()),
        "T, H, U, G and step must be finite"
    );
    ensure_input!(t >= 100.0 && h > 0.0, "need T ≥ 100 and H > 0, got T = {t}, H = {h}");
    ensure_input!(g >= 1.0 && u >= 0.0, "need G ≥ 1 and U ≥ 0, got G = {g}, U = {u}");
    ensure_input!(step > 0.0, "step must be positive, got {step}");
    let notes: Vec<String> = short_interval_violations(t, h, u, g)
        .into_iter()
        .map(|v| format!("condition (T^ε ≤ U ≤ G ≤ ½√T, T^ε ≤ H ≤ T, HU ≥ T^(1+ε)) violated: {v}"))
        .collect();
    let hstep = aligned_step(step, grid.dt());
    let ell = log_ratio(t, g);
    let mut record = ExperimentRecord {
        t,
        g,
        u,
        h,
        step: hstep,
        statistic: 0.0,
        normalized: 0.0,
    };
    if u > 0.0 {
        let l = (t + h + u).ln();
        grid.ensure_covers(t - g * l, t + h + u + g * l, "the short-interval I₁ mean square")?;
        let smoother = Smoother::new(grid, g, l)?;
        record.statistic =
            riemann_square(t, h, hstep, |x| Ok(smoother.value(x + u)? - smoother.value(x)?))?;
        record.normalized = record.statistic / (h * u * u / g * ell.powi(3));
    }
    Ok(ExperimentResult::single("meansq_i1_short", record, notes))
}

/// ∫_T^{2T} (Δ(x+U) − Δ(x))² dx by a midpoint sum, normalized by
/// T·U·log³(√T/U).
pub fn meansq_delta_diff(t: f64, u: f64, table: &DivisorTable, step: f64) -> Result<ExperimentResult> {
    ensure_input!(t.is_finite() && t >= 4.0, "T must be ≥ 4, got {t}");
    ensure_input!(
        u == 0.0 || (u >= 1.0 && u <= 0.5 * t.sqrt()),
        "U must satisfy 1 ≤ U ≤ ½√T (or U = 0), got U = {u} at T = {t}"
    );
    ensure_input!(step.is_finite() && step > 0.0, "step must be positive, got {step}");
    table.ensure_covers(2.0 * t + u, "the Δ-difference mean square")?;
    let n = (t / step).ceil() as usize;
    let h = t / n as f64;
    let mut record = ExperimentRecord {
        t,
        g: 0.0,
        u,
        h: t,
        step: h,
        statistic: 0.0,
        normalized: 0.0,
    };
    if u > 0.0 {
        let chunk = 1 << 14;
        let partial: Vec<f64> = (0..n.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut acc = CompensatedSum::new();
                for k in c * chunk..((c + 1) * chunk).min(n) {
                    let x = t + (k as f64 + 0.5) * h;
                    let d = table.delta_unchecked(x + u) - table.delta_unchecked(x);
                    acc.add(d * d);
                }
                acc.value()
            })
            .collect();
        record.statistic = h * partial.into_iter().collect::<CompensatedSum>().value();
        record.normalized = record.statistic / (t * u * log_ratio(t, u).powi(3));
    }
    Ok(ExperimentResult::single("meansq_delta_diff", record, Vec::new()))
}

/// Fits statistic/(T·X) against {1, ℓ, ℓ², ℓ³}, ℓ = log(√T/X), where X is
/// the width selected by `width`.
fn fit_over_records(
    records: &[ExperimentRecord],
    width: impl Fn(&ExperimentRecord) -> f64,
    regressor: &str,
) -> Result<LogPolyFit> {
    let ells: Vec<f64> = records.iter().map(|r| log_ratio(r.t, width(r))).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.statistic / (r.t * width(r))).collect();
    fit_log_cubic(&ells, &ys, regressor)
}

/// Fits the long-interval main term: statistic/(T·G) ≈ Σ â_j ℓ^j, ℓ = log(√T/G).
pub fn fit_theorem1(results: &[ExperimentResult]) -> Result<LogPolyFit> {
    let records: Vec<ExperimentRecord> = results.iter().flat_map(|r| r.records.clone()).collect();
    ensure_input!(
        records.len() >= 8,
        "fit_theorem1 needs at least 8 (T,G) pairs, got {}",
        records.len()
    );
    ensure_input!(
        records.iter().all(|r| r.g > 0.0 && r.t > 0.0),
        "every record needs T > 0 and G > 0"
    );
    let ells: Vec<f64> = records.iter().map(|r| log_ratio(r.t, r.g)).collect();
    let lo = ells.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ells.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure_input!(
        hi - lo >= 1.5,
        "log(√T/G) must span at least 1.5 across the ladder, spans {}",
        hi - lo
    );
    fit_over_records(&records, |r| r.g, "log(sqrt(T)/G)")
}

/// Fits the Δ main term: statistic/(T·U) ≈ Σ ĉ_j ℓ^j, ℓ = log(√T/U).
pub fn fit_delta_ladder(results: &[ExperimentResult]) -> Result<LogPolyFit> {
    let records: Vec<ExperimentRecord> = results
        .iter()
        .flat_map(|r| r.records.clone())
        .filter(|r| r.u > 0.0)
        .collect();
    fit_over_records(&records, |r| r.u, "log(sqrt(T)/U)")
}

/// Remainder sizes of one record against the main term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetEntry {
    pub t: f64,
    pub g: f64,
    /// T^(1+ε)·G^(1/2).
    pub remainder_long: f64,
    /// T^(1/2+ε)·G².
    pub remainder_smooth: f64,
    /// â₃·T·G·ℓ³ (â₃ = 1 when no usable fit is attached).
    pub main: f64,
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetReport {
    pub entries: Vec<BudgetEntry>,
    pub notes: Vec<String>,
}

/// Remainder magnitude of the long-interval formula at (T, G) relative to
/// its leading term; `leading` is the coefficient of T·G·ℓ³.
pub fn budget_entry(t: f64, g: f64, leading: f64) -> BudgetEntry {
    let remainder_long = t.powf(1.0 + RANGE_EPSILON) * g.sqrt();
    let remainder_smooth = t.powf(0.5 + RANGE_EPSILON) * g * g;
    let main = leading * t * g * log_ratio(t, g).powi(3);
    let ratio = (remainder_long + remainder_smooth) / main.abs();
    BudgetEntry {
        t,
        g,
        remainder_long,
        remainder_smooth,
        main,
        ratio,
        flagged: !(ratio <= BUDGET_FLAG_RATIO),
    }
}

/// Remainder budget with ε = 0.05 for every record with a smoothing width.
pub fn error_budget(result: &ExperimentResult) -> BudgetReport {
    let mut notes = Vec::new();
    let leading = match &result.fit {
        Some(fit) if fit.coeffs[3] > 0.0 => fit.coeffs[3],
        Some(fit) => {
            notes.push(format!(
                "fitted leading coefficient {} is not positive; budget uses 1",
                fit.coeffs[3]
            ));
            1.0
        }
        None => 1.0,
    };
    let entries: Vec<BudgetEntry> = result
        .records
        .iter()
        .filter(|r| r.g > 0.0)
        .map(|r| budget_entry(r.t, r.g, leading))
        .collect();
    for e in entries.iter().filter(|e| e.flagged) {
        notes.push(format!(
            "T = {}, G = {}: remainder/main = {:.3} — non-asymptotic regime",
            e.t, e.g, e.ratio
        ));
    }
    BudgetReport { entries, notes }
}

/// (T, G = T^θ) pairs: `count` T values geometric in [t_lo, t_hi] times θ.
pub fn theorem1_ladder(t_lo: f64, t_hi: f64, count: usize, thetas: &[f64]) -> Vec<(f64, f64)> {
    geometric_points(t_lo, t_hi, count)
        .into_iter()
        .flat_map(|t| thetas.iter().map(move |th| (t, t.powf(*th))))
        .collect()
}

/// Default outer step: G/8 for I₁ experiments.
pub fn default_i1_step(g: f64) -> f64 {
    g / 8.0
}

/// Default outer step: max(¼, U/8) for Δ and E experiments.
pub fn default_delta_step(u: f64) -> f64 {
    (u / 8.0).max(0.25)
}

/// CSV with header `experiment_id,T,G,U,H,step,statistic,normalized`.
pub fn experiments_csv(results: &[ExperimentResult]) -> Csv {
    let mut csv = Csv::new(&[
        "experiment_id", "T", "G", "U", "H", "step", "statistic", "normalized",
    ]);
    for res in results {
        for r in &res.records {
            csv.record(&[&res.id, &r.t, &r.g, &r.u, &r.h, &r.step, &r.statistic, &r.normalized]);
        }
    }
    csv
}

/// CSV with header `regressor,c0,c1,c2,c3,residual_norm,condition`.
pub fn fit_csv(fits: &[LogPolyFit]) -> Csv {
    let mut csv = Csv::new(&["regressor", "c0", "c1", "c2", "c3", "residual_norm", "condition"]);
    for f in fits {
        let c = &f.coeffs;
        csv.record(&[&f.regressor, &c[0], &c[1], &c[2], &c[3], &f.residual_norm, &f.condition]);
    }
    csv
}
