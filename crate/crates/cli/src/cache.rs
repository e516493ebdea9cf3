//! On-disk cache of sampled grids with advisory locking and LRU eviction.
//!
//! A job holds a shared lock on every grid file it uses; writers serialise on
//! a side `.lock` file; eviction only removes files it can lock exclusively.

use std::fs::{self, File, OpenOptions, TryLockError};
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use anyhow::{Context, Result};
use zetalab_core::zeta::{read_grid, sample_abs2_grid, write_grid, ZetaGrid};
use zetalab_core::LabError;

pub const GRID_EXTENSION: &str = "zgrid";

pub struct GridCache {
    dir: PathBuf,
}

/// A grid together with the shared lock that keeps it from being evicted.
pub struct CachedGrid {
    pub grid: ZetaGrid,
    pub path: PathBuf,
    _lock: File,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct GcReport {
    pub files: usize,
    pub evicted: usize,
    pub evicted_bytes: u64,
    pub skipped_locked: usize,
    pub remaining_bytes: u64,
}

fn io_err(path: &Path, source: std::io::Error) -> anyhow::Error {
    LabError::Io {
        path: path.to_path_buf(),
        source,
    }
    .into()
}

impl GridCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// File name keyed by the bit patterns of (t0, t1, dt, accuracy).
    pub fn key(t0: f64, t1: f64, dt: f64, accuracy: f64) -> String {
        format!(
            "grid-{:016x}-{:016x}-{:016x}-{:016x}.{GRID_EXTENSION}",
            t0.to_bits(),
            t1.to_bits(),
            dt.to_bits(),
            accuracy.to_bits()
        )
    }

    fn ensure_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| io_err(&self.dir, e))
    }

    fn open_locked(path: &Path) -> Result<Option<File>> {
        match OpenOptions::new().read(true).write(true).open(path) {
            Ok(f) => {
                f.lock_shared().map_err(|e| io_err(path, e))?;
                Ok(Some(f))
            }
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(path, e)),
        }
    }

    /// Loads the grid for [t0, t1] at (dt, accuracy), sampling and storing
    /// it on a miss.
    pub fn grid(&self, t0: f64, t1: f64, dt: f64, accuracy: f64) -> Result<CachedGrid> {
        self.ensure_dir()?;
        let path = self.dir.join(Self::key(t0, t1, dt, accuracy));
        if let Some(hit) = self.try_load(&path, t0, dt)? {
            return Ok(hit);
        }
        let lock_path = path.with_extension("lock");
        let writer = File::create(&lock_path).map_err(|e| io_err(&lock_path, e))?;
        writer.lock().map_err(|e| io_err(&lock_path, e))?;
        // Another process may have finished the same grid while we waited.
        if let Some(hit) = self.try_load(&path, t0, dt)? {
            return Ok(hit);
        }
        let grid = sample_abs2_grid(t0, t1, dt, accuracy)?;
        write_grid(&path, &grid)?;
        let lock = Self::open_locked(&path)?
            .with_context(|| format!("grid file {} vanished after writing", path.display()))?;
        drop(writer);
        Ok(CachedGrid {
            grid,
            path,
            _lock: lock,
        })
    }

    fn try_load(&self, path: &Path, t0: f64, dt: f64) -> Result<Option<CachedGrid>> {
        let Some(lock) = Self::open_locked(path)? else {
            return Ok(None);
        };
        let grid = match read_grid(path) {
            Ok(g) => g,
            // Evicted between open and lock, or damaged: resample.
            Err(LabError::Io { source, .. }) if source.kind() == ErrorKind::NotFound => {
                return Ok(None)
            }
            Err(LabError::Format { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        if grid.t0() != t0 || grid.dt() != dt {
            return Ok(None);
        }
        // Recency for LRU eviction.
        let _ = lock.set_modified(SystemTime::now());
        Ok(Some(CachedGrid {
            grid,
            path: path.to_path_buf(),
            _lock: lock,
        }))
    }

    /// Evicts least-recently-used grid files until the total size is at
    /// most `max_bytes`, skipping files locked by running jobs.
    pub fn gc(&self, max_bytes: u64) -> Result<GcReport> {
        let mut report = GcReport::default();
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(report),
            Err(e) => return Err(io_err(&self.dir, e)),
        };
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| io_err(&self.dir, e))?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some(GRID_EXTENSION) {
                continue;
            }
            let meta = entry.metadata().map_err(|e| io_err(&path, e))?;
            let used = meta.modified().map_err(|e| io_err(&path, e))?;
            files.push((used, path, meta.len()));
        }
        files.sort();
        report.files = files.len();
        let mut total: u64 = files.iter().map(|f| f.2).sum();
        for (_, path, len) in files {
            if total <= max_bytes {
                break;
            }
            let file = match File::open(&path) {
                Ok(f) => f,
                Err(e) if e.kind() == ErrorKind::NotFound => {
                    total -= len;
                    continue;
                }
                Err(e) => return Err(io_err(&path, e)),
            };
            match file.try_lock() {
                Ok(()) => {}
                Err(TryLockError::WouldBlock) => {
                    report.skipped_locked += 1;
                    continue;
                }
                Err(TryLockError::Error(e)) => return Err(io_err(&path, e)),
            }
            fs::remove_file(&path).map_err(|e| io_err(&path, e))?;
            let _ = fs::remove_file(path.with_extension("lock"));
            total -= len;
            report.evicted += 1;
            report.evicted_bytes += len;
        }
        report.remaining_bytes = total;
        Ok(report)
    }
}
