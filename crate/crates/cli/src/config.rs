//! Run parameters: command-line flags merged over a key=value config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use zetalab_core::LabError;

pub const CACHE_ENV: &str = "ZETALAB_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".zetalab-cache";

/// Numeric and path parameters shared by every command.
#[derive(Args, Clone, Debug, Default)]
pub struct Params {
    /// Height T (start of the interval, or the ordinate).
    #[arg(long = "T", global = true)]
    pub t: Option<f64>,
    /// Smoothing width G.
    #[arg(long = "G", global = true)]
    pub g: Option<f64>,
    /// Shift U.
    #[arg(long = "U", global = true)]
    pub u: Option<f64>,
    /// Interval length H.
    #[arg(long = "H", global = true)]
    pub h: Option<f64>,
    /// Grid step for sampling |ζ(½+it)|².
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Outer sampling step of the mean-square experiments.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Size of the divisor table (upper sample point for fit-d2).
    #[arg(long, global = true)]
    pub nmax: Option<f64>,
    /// Absolute accuracy of every ζ evaluation.
    #[arg(long, global = true)]
    pub accuracy: Option<f64>,
    /// Directory of cached ZGRID1 files [env: ZETALAB_CACHE].
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Output CSV path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// key=value file supplying defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn invalid(msg: String) -> anyhow::Error {
    LabError::InvalidInput(msg).into()
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str, origin: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            invalid(format!("{}:{}: expected key=value, got {line:?}", origin.display(), i + 1))
        })?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| invalid(format!("config key {key}: cannot parse {value:?} as a number")))
}

impl Params {
    /// Fills every unset flag from the config file, if one was given.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        for (key, value) in parse_config(&text, &path)? {
            let v = value.as_str();
            match key.as_str() {
                "T" => self.t = self.t.or(Some(number(&key, v)?)),
                "G" => self.g = self.g.or(Some(number(&key, v)?)),
                "U" => self.u = self.u.or(Some(number(&key, v)?)),
                "H" => self.h = self.h.or(Some(number(&key, v)?)),
                "dt" => self.dt = self.dt.or(Some(number(&key, v)?)),
                "step" => self.step = self.step.or(Some(number(&key, v)?)),
                "nmax" => self.nmax = self.nmax.or(Some(number(&key, v)?)),
                "accuracy" => self.accuracy = self.accuracy.or(Some(number(&key, v)?)),
                "workers" => self.workers = self.workers.or(Some(number(&key, v)?)),
                "cache-dir" | "cache_dir" => {
                    self.cache_dir = self.cache_dir.or_else(|| Some(PathBuf::from(v)))
                }
                "out" => self.out = self.out.or_else(|| Some(PathBuf::from(v))),
                _ => return Err(invalid(format!("unknown config key {key:?} in {}", path.display()))),
            }
        }
        Ok(self)
    }

    /// The flag or config value, then `ZETALAB_CACHE`, then `.zetalab-cache`.
    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
    }

    pub fn require(value: Option<f64>, flag: &str, command: &str) -> Result<f64> {
        match value {
            Some(v) if v.is_finite() => Ok(v),
            Some(v) => Err(invalid(format!("--{flag} must be finite, got {v}"))),
            None => Err(invalid(format!("{command} needs --{flag}"))),
        }
    }
}
