//! One function per subcommand.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use zetalab_core::atkinson::{atkinson_csv, atkinson_e, direct_e};
use zetalab_core::divisor::{divisor_sieve, fit_d2_main_term, DivisorTable};
use zetalab_core::experiments::{
    budget_entry, default_delta_step, default_i1_step, experiments_csv, fit_csv, fit_theorem1,
    meansq_delta_diff, meansq_i1_long, meansq_i1_short, theorem1_ladder, ExperimentResult,
    THEOREM1_THETAS,
};
use zetalab_core::fit::geometric_ladder;
use zetalab_core::report::Csv;
use zetalab_core::smoothed::{explicit_truncation, i1_direct, i1_explicit_diff, moments_csv};
use zetalab_core::zeta::{DEFAULT_ACCURACY, MIN_GRID_START};
use zetalab_core::LabError;

use crate::cache::{CachedGrid, GridCache};
use crate::config::Params;

pub const DEFAULT_DT: f64 = 0.01;
/// Grid ends are rounded outward to multiples of this, so that nearby
/// requests share cache files.
const SPAN_QUANTUM: f64 = 10.0;

pub struct Ctx {
    pub params: Params,
    pub cache: GridCache,
}

fn require(v: Option<f64>, flag: &str, command: &str) -> Result<f64> {
    Params::require(v, flag, command)
}

impl Ctx {
    pub fn new(params: Params) -> Self {
        let cache = GridCache::new(params.cache_dir());
        Self { params, cache }
    }

    fn dt(&self) -> f64 {
        self.params.dt.unwrap_or(DEFAULT_DT)
    }

    fn accuracy(&self) -> f64 {
        self.params.accuracy.unwrap_or(DEFAULT_ACCURACY)
    }

    /// Grid covering [lo, hi] with both ends rounded outward.
    fn grid_covering(&self, lo: f64, hi: f64) -> Result<CachedGrid> {
        let t0 = ((lo / SPAN_QUANTUM).floor() * SPAN_QUANTUM).max(MIN_GRID_START);
        let t1 = (hi / SPAN_QUANTUM).ceil() * SPAN_QUANTUM + SPAN_QUANTUM;
        self.cache.grid(t0, t1, self.dt(), self.accuracy())
    }

    /// Divisor table of at least `needed` entries, or exactly `--nmax`.
    fn table(&self, needed: f64) -> Result<DivisorTable> {
        let n = self.params.nmax.unwrap_or(needed.ceil().max(1.0));
        if !(n.is_finite() && n >= 1.0) {
            return Err(LabError::InvalidInput(format!("--nmax must be ≥ 1, got {n}")).into());
        }
        Ok(divisor_sieve(n as usize)?)
    }

    fn emit(&self, csv: &Csv) -> Result<()> {
        emit_to(csv, self.params.out.as_deref())
    }
}

fn emit_to(csv: &Csv, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(csv.write_to(path)?),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_str().as_bytes())
                .and_then(|_| stdout.flush())
                .context("writing to standard output")
        }
    }
}

fn print_notes(results: &[ExperimentResult]) {
    for note in results.iter().flat_map(|r| &r.notes) {
        eprintln!("note: {note}");
    }
}

/// `<out>` with its extension replaced by `<suffix>.csv`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(format!("{suffix}.csv"))
}

pub fn sample_zeta(ctx: &Ctx) -> Result<()> {
    let t = require(ctx.params.t, "T", "sample-zeta")?;
    let h = require(ctx.params.h, "H", "sample-zeta")?;
    let cached = ctx.cache.grid(t, t + h, ctx.dt(), ctx.accuracy())?;
    eprintln!("grid: {} samples in {}", cached.grid.count(), cached.path.display());
    let mut csv = Csv::new(&["t", "abs2"]);
    for (k, v) in cached.grid.values().iter().enumerate() {
        csv.record(&[&cached.grid.t_at(k), v]);
    }
    ctx.emit(&csv)
}

pub fn e_term(ctx: &Ctx) -> Result<()> {
    let t = require(ctx.params.t, "T", "e-term")?;
    let table = ctx.table(t)?;
    let atkinson = atkinson_e(t, t, &table)?;
    let cached = ctx.grid_covering(MIN_GRID_START, t)?;
    let direct = direct_e(t, &cached.grid)?;
    ctx.emit(&atkinson_csv(&[(atkinson, direct)]))
}

pub fn i1(ctx: &Ctx) -> Result<()> {
    let t = require(ctx.params.t, "T", "i1")?;
    let g = require(ctx.params.g, "G", "i1")?;
    let table = ctx.table(explicit_truncation(t, g) as f64)?;
    let explicit = i1_explicit_diff(t, g, &table)?;
    let l = (t + g).ln();
    let cached = ctx.grid_covering(t - g * l, t + g + g * l)?;
    let at_t = i1_direct(t, g, &cached.grid)?;
    let at_tg = i1_direct(t + g, g, &cached.grid)?;
    ctx.emit(&moments_csv(&[at_t, at_tg, explicit]))
}

pub fn meansq_delta(ctx: &Ctx) -> Result<()> {
    let t = require(ctx.params.t, "T", "meansq-delta")?;
    let u = require(ctx.params.u, "U", "meansq-delta")?;
    let step = ctx.params.step.unwrap_or_else(|| default_delta_step(u));
    let table = ctx.table(2.0 * t + u + 1.0)?;
    let result = meansq_delta_diff(t, u, &table, step)?;
    ctx.emit(&experiments_csv(&[result]))
}

pub fn meansq_i1(ctx: &Ctx) -> Result<()> {
    let t = require(ctx.params.t, "T", "meansq-i1")?;
    let g = require(ctx.params.g, "G", "meansq-i1")?;
    let step = ctx.params.step.unwrap_or_else(|| default_i1_step(g));
    let l = (2.0 * t + g).ln();
    let cached = ctx.grid_covering(t - g * l, 2.0 * t + g + g * l)?;
    let result = meansq_i1_long(t, g, &cached.grid, step)?;
    print_notes(std::slice::from_ref(&result));
    ctx.emit(&experiments_csv(&[result]))
}

pub fn meansq_i1_short_cmd(ctx: &Ctx) -> Result<()> {
    let cmd = "meansq-i1-short";
    let t = require(ctx.params.t, "T", cmd)?;
    let h = require(ctx.params.h, "H", cmd)?;
    let u = require(ctx.params.u, "U", cmd)?;
    let g = require(ctx.params.g, "G", cmd)?;
    let step = ctx.params.step.unwrap_or_else(|| default_i1_step(g));
    let l = (t + h + u).ln();
    let cached = ctx.grid_covering(t - g * l, t + h + u + g * l)?;
    let result = meansq_i1_short(t, h, u, g, &cached.grid, step)?;
    print_notes(std::slice::from_ref(&result));
    ctx.emit(&experiments_csv(&[result]))
}

pub fn fit_d2(ctx: &Ctx) -> Result<()> {
    let lo = ctx.params.t.unwrap_or(1e4);
    let hi = ctx.params.nmax.unwrap_or(1e7);
    let table = ctx.table(hi)?;
    let fit = fit_d2_main_term(&geometric_ladder(lo, hi, 1.5), &table)?;
    eprintln!(
        "d3 = {} ± {} (1/(2π²) = {}, 1/π² = {})",
        fit.coeffs[3],
        fit.std_errors[3],
        1.0 / (2.0 * PI * PI),
        1.0 / (PI * PI)
    );
    ctx.emit(&fit_csv(&[fit]))
}

pub fn fit_theorem1_cmd(ctx: &Ctx) -> Result<()> {
    let t_hi = ctx.params.t.unwrap_or(1e5);
    let ladder = theorem1_ladder(t_hi / 10.0, t_hi, 5, &THEOREM1_THETAS);
    let lo = ladder.iter().map(|(t, g)| t - g * (2.0 * t + g).ln()).fold(f64::INFINITY, f64::min);
    let hi = ladder
        .iter()
        .map(|(t, g)| 2.0 * t + g + g * (2.0 * t + g).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let cached = ctx.grid_covering(lo, hi)?;
    let results = ladder
        .iter()
        .map(|&(t, g)| meansq_i1_long(t, g, &cached.grid, ctx.params.step.unwrap_or_else(|| default_i1_step(g))))
        .collect::<zetalab_core::Result<Vec<_>>>()?;
    print_notes(&results);
    let fit = fit_theorem1(&results)?;
    eprintln!("a3 = {} ± {}", fit.coeffs[3], fit.std_errors[3]);
    ctx.emit(&experiments_csv(&results))?;
    let fit_out = ctx.params.out.as_deref().map(|p| sibling(p, "fit"));
    if fit_out.is_none() {
        println!();
    }
    emit_to(&fit_csv(&[fit]), fit_out.as_deref())
}

/// Remainder budget of the long-interval formula at T over a range of G.
pub fn report(ctx: &Ctx) -> Result<()> {
    let t = require(ctx.params.t, "T", "report")?;
    let widths: Vec<f64> = match ctx.params.g {
        Some(g) => vec![g],
        None => [0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.49].iter().map(|th| t.powf(*th)).collect(),
    };
    let mut csv = Csv::new(&["T", "G", "remainder_long", "remainder_smooth", "main", "ratio", "flagged"]);
    for g in widths {
        let e = budget_entry(t, g, 1.0);
        csv.record(&[&e.t, &e.g, &e.remainder_long, &e.remainder_smooth, &e.main, &e.ratio, &e.flagged]);
    }
    ctx.emit(&csv)
}

pub fn cache_gc(ctx: &Ctx, max_bytes: u64) -> Result<()> {
    let r = ctx.cache.gc(max_bytes)?;
    println!(
        "scanned {} grid files: evicted {} ({} bytes), skipped {} in use, {} bytes remain",
        r.files, r.evicted, r.evicted_bytes, r.skipped_locked, r.remaining_bytes
    );
    Ok(())
}
