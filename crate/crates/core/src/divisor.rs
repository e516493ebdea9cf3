//! The divisor function d(n), the divisor-problem error term Δ(x) and the
//! summatory function of d²(n).

use crate::error::{ensure_input, Result};
use crate::fit::{fit_log_cubic, LogPolyFit};
use crate::report::Csv;
use crate::EULER_GAMMA;

/// Largest table the sieve will build (about 2 GB of prefix data).
pub const MAX_SIEVE: usize = 100_000_000;

/// d(n) and the prefix sums of d(n) and d²(n) for 1 ≤ n ≤ n_max.
///
/// Index 0 of every vector is a zero sentinel so that `prefix_d[n]` is the
/// sum over m ≤ n.
#[derive(Clone, Debug)]
pub struct DivisorTable {
    d: Vec<u32>,
    prefix_d: Vec<u64>,
    prefix_d2: Vec<u64>,
}

/// Sieves d(n) for n ≤ n_max by adding 1 to every multiple of every k.
pub fn divisor_sieve(n_max: usize) -> Result<DivisorTable> {
    ensure_input!(
        (1..=MAX_SIEVE).contains(&n_max),
        "n_max must satisfy 1 ≤ n_max ≤ 1e8, got {n_max}"
    );
    let mut d = vec![0u32; n_max + 1];
    for k in 1..=n_max {
        for m in (k..=n_max).step_by(k) {
            d[m] += 1;
        }
    }
    let mut prefix_d = vec![0u64; n_max + 1];
    let mut prefix_d2 = vec![0u64; n_max + 1];
    for n in 1..=n_max {
        let v = d[n] as u64;
        prefix_d[n] = prefix_d[n - 1] + v;
        prefix_d2[n] = prefix_d2[n - 1] + v * v;
    }
    Ok(DivisorTable {
        d,
        prefix_d,
        prefix_d2,
    })
}

impl DivisorTable {
    pub fn n_max(&self) -> usize {
        self.d.len() - 1
    }

    /// d(n); panics outside 1..=n_max.
    pub fn d(&self, n: usize) -> u32 {
        assert!(n >= 1, "d(0) is undefined");
        self.d[n]
    }

    /// Σ_{m≤n} d(m), with the empty sum at n = 0.
    pub fn prefix_d(&self, n: usize) -> u64 {
        self.prefix_d[n]
    }

    /// Σ_{m≤n} d²(m), with the empty sum at n = 0.
    pub fn prefix_d2(&self, n: usize) -> u64 {
        self.prefix_d2[n]
    }

    pub(crate) fn ensure_covers(&self, n: f64, what: &str) -> Result<()> {
        ensure_input!(
            n <= self.n_max() as f64,
            "{what} needs d(n) up to n = {} but the divisor table stops at {}",
            n.floor(),
            self.n_max()
        );
        Ok(())
    }

    /// Δ(x) without range checks; requires 1 ≤ x ≤ n_max.
    #[inline]
    pub(crate) fn delta_unchecked(&self, x: f64) -> f64 {
        self.prefix_d[x as usize] as f64 - x * (x.ln() + 2.0 * EULER_GAMMA - 1.0)
    }
}

/// Δ(x) = Σ_{n≤x} d(n) − x(log x + 2γ − 1).
pub fn delta(x: f64, table: &DivisorTable) -> Result<f64> {
    ensure_input!(x.is_finite() && x >= 1.0, "Δ(x) needs x ≥ 1, got {x}");
    table.ensure_covers(x, "Δ(x)")?;
    Ok(table.delta_unchecked(x))
}

/// Σ_{n≤x} d²(n).
pub fn d2_summatory(x: f64, table: &DivisorTable) -> Result<u64> {
    ensure_input!(x.is_finite(), "x must be finite, got {x}");
    table.ensure_covers(x, "the d² summatory function")?;
    Ok(if x < 1.0 { 0 } else { table.prefix_d2[x as usize] })
}

/// Fits D₂(x)/x against {1, log x, log²x, log³x}.
pub fn fit_d2_main_term(xs: &[f64], table: &DivisorTable) -> Result<LogPolyFit> {
    ensure_input!(xs.len() >= 8, "need at least 8 sample points, got {}", xs.len());
    ensure_input!(
        xs.iter().all(|x| x.is_finite() && *x >= 1.0),
        "sample points must be finite and ≥ 1"
    );
    let ratios: Vec<f64> = xs.windows(2).map(|w| w[1] / w[0]).collect();
    ensure_input!(
        ratios.iter().all(|r| *r > 1.0),
        "sample points must be strictly increasing"
    );
    let mean_log_ratio = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
    ensure_input!(
        ratios.iter().all(|r| (r.ln() / mean_log_ratio - 1.0).abs() <= 0.05),
        "sample points must be geometrically spaced"
    );
    let ys = xs
        .iter()
        .map(|&x| Ok(d2_summatory(x, table)? as f64 / x))
        .collect::<Result<Vec<_>>>()?;
    let ells: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    fit_log_cubic(&ells, &ys, "log(x)")
}

/// CSV with header `x,d2_sum,delta` for the given sample points.
pub fn samples_csv(xs: &[f64], table: &DivisorTable) -> Result<Csv> {
    let mut csv = Csv::new(&["x", "d2_sum", "delta"]);
    for &x in xs {
        csv.record(&[&x, &d2_summatory(x, table)?, &delta(x, table)?]);
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = divisor_sieve(100).unwrap();
        assert_eq!([t.d(1), t.d(6), t.d(12), t.d(35), t.d(97)], [1, 4, 6, 4, 2]);
        assert_eq!(d2_summatory(10.0, &t).unwrap(), 83);
        assert_eq!(d2_summatory(1.0, &t).unwrap(), 1);
        assert_eq!(t.prefix_d(0), 0);
    }

    #[test]
    fn delta_at_one() {
        let t = divisor_sieve(10).unwrap();
        let v = delta(1.0, &t).unwrap();
        assert!((v - 0.845_568_670_196_934_3).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(divisor_sieve(0).is_err());
        assert!(divisor_sieve(MAX_SIEVE + 1).is_err());
        let t = divisor_sieve(50).unwrap();
        assert!(delta(50.5, &t).is_err());
        assert!(delta(0.5, &t).is_err());
        assert!(d2_summatory(51.0, &t).is_err());
    }

    #[test]
    fn delta_jumps_by_d_at_integers() {
        let t = divisor_sieve(100).unwrap();
        for n in [12usize, 60, 97] {
            let x = n as f64;
            let jump = delta(x, &t).unwrap() - delta(x - 1e-9, &t).unwrap();
            assert!((jump - t.d(n) as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn fit_needs_geometric_points() {
        let t = divisor_sieve(1000).unwrap();
        let linear: Vec<f64> = (1..=10).map(|k| 100.0 * k as f64).collect();
        assert!(fit_d2_main_term(&linear, &t).is_err());
        assert!(fit_d2_main_term(&linear[..5], &t).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = divisor_sieve(20).unwrap();
        let csv = samples_csv(&[10.0], &t).unwrap();
        let mut lines = csv.as_str().lines();
        assert_eq!(lines.next(), Some("x,d2_sum,delta"));
        assert!(lines.next().unwrap().starts_with("10,83,"));
    }
}
