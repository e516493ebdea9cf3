//! `zetalab`: command-line front end of the zeta mean-square laboratory.

mod cache;
mod commands;
mod config;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use zetalab_core::LabError;

use crate::commands::Ctx;
use crate::config::Params;

#[derive(Parser)]
#[command(name = "zetalab", version, about = "Numerical experiments on the mean square of ζ(½+it)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand)]
enum Command {
    /// Sample |ζ(½+it)|² on [T, T+H] into the cache and as CSV.
    SampleZeta,
    /// E(T) by Atkinson's formula (N = T) and by direct quadrature.
    ETerm,
    /// I₁(T,G), I₁(T+G,G) and the explicit-formula difference.
    I1,
    /// ∫_T^{2T} (Δ(x+U) − Δ(x))² dx.
    MeansqDelta,
    /// ∫_T^{2T} (I₁(t+G,G) − I₁(t,G))² dt.
    MeansqI1,
    /// ∫_T^{T+H} (I₁(t+U,G) − I₁(t,G))² dt.
    MeansqI1Short,
    /// Log-cubic fit of Σ_{n≤x} d²(n)/x over x ∈ [T, nmax] (defaults 1e4, 1e7).
    FitD2,
    /// Long-interval ladder up to T (default 1e5) and its log-cubic fit.
    FitTheorem1,
    /// Remainder budget of the long-interval formula at T.
    Report,
    /// Evict least-recently-used cached grids down to a size budget.
    CacheGc {
        /// Size budget in bytes.
        #[arg(long = "max-bytes")]
        max_bytes: u64,
    },
}

fn run(cli: Cli) -> Result<()> {
    let params = cli.params.resolve()?;
    if let Some(w) = params.workers {
        if w == 0 {
            return Err(LabError::InvalidInput("--workers must be ≥ 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    let ctx = Ctx::new(params);
    match cli.command {
        Command::SampleZeta => commands::sample_zeta(&ctx),
        Command::ETerm => commands::e_term(&ctx),
        Command::I1 => commands::i1(&ctx),
        Command::MeansqDelta => commands::meansq_delta(&ctx),
        Command::MeansqI1 => commands::meansq_i1(&ctx),
        Command::MeansqI1Short => commands::meansq_i1_short_cmd(&ctx),
        Command::FitD2 => commands::fit_d2(&ctx),
        Command::FitTheorem1 => commands::fit_theorem1_cmd(&ctx),
        Command::Report => commands::report(&ctx),
        Command::CacheGc { max_bytes } => commands::cache_gc(&ctx, max_bytes),
    }
}

/// 2 validation, 3 IO, 4 numeric failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<LabError>() {
            return match e {
                LabError::InvalidInput(_) => 2,
                LabError::Io { .. } | LabError::Format { .. } => 3,
                LabError::FitDegenerate(_) | LabError::Numeric(_) => 4,
            };
        }
        if cause.is::<std::io::Error>() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
