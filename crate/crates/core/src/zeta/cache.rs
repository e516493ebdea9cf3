//! `ZGRID1` binary grid files.
//!
//! Layout: the 6 magic bytes `ZGRID1`, then little-endian f64 t0, f64 dt,
//! u64 count, and `count` f64 samples. Nothing may follow the samples.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::ZetaGrid;
use crate::error::{LabError, Result};

pub const GRID_MAGIC: &[u8; 6] = b"ZGRID1";
const HEADER_LEN: usize = 6 + 8 + 8 + 8;

fn format_err(path: &Path, reason: impl Into<String>) -> LabError {
    LabError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Serialises a grid into the `ZGRID1` byte layout.
pub fn encode_grid(grid: &ZetaGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.count());
    out.extend_from_slice(GRID_MAGIC);
    out.extend_from_slice(&grid.t0().to_le_bytes());
    out.extend_from_slice(&grid.dt().to_le_bytes());
    out.extend_from_slice(&(grid.count() as u64).to_le_bytes());
    for v in grid.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_grid(bytes: &[u8], path: &Path) -> Result<ZetaGrid> {
    if bytes.len() < HEADER_LEN {
        return Err(format_err(path, format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..6] != GRID_MAGIC {
        return Err(format_err(path, "magic bytes are not ZGRID1"));
    }
    let f = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let t0 = f(6);
    let dt = f(14);
    let count = u64::from_le_bytes(bytes[22..30].try_into().unwrap());
    let payload = bytes.len() - HEADER_LEN;
    let expected = count
        .checked_mul(8)
        .ok_or_else(|| format_err(path, "sample count overflows"))?;
    if payload as u64 != expected {
        return Err(format_err(
            path,
            format!("payload holds {payload} bytes, header promises {expected}"),
        ));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ZetaGrid::new(t0, dt, values).map_err(|e| format_err(path, e.to_string()))
}

/// Writes the grid atomically: the bytes go to a temporary file in the
/// target directory, which is then renamed over `path`.
pub fn write_grid(path: &Path, grid: &ZetaGrid) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        w.write_all(&encode_grid(grid))
            .and_then(|_| w.flush())
            .map_err(|e| LabError::io(tmp.path(), e))?;
    }
    tmp.as_file().sync_all().map_err(|e| LabError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<ZetaGrid> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| LabError::io(path, e))?;
    decode_grid(&bytes, path)
}
