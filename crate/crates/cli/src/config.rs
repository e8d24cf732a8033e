//! JSON config loading and flag parsing helpers.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use std::path::Path;

/// Parse a JSON config; unknown keys are rejected by the target types.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `"1,2,3"` → `[1, 2, 3]`.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad list entry '{p}': {e}"))
        })
        .collect()
}

/// `"lo:hi:step"` → the grid `lo, lo + step, …, hi`.
pub fn parse_grid(s: &str) -> Result<(f64, f64, f64)> {
    let parts = parse_list_sep::<f64>(s, ':')?;
    let [lo, hi, step] = parts[..] else {
        bail!("grid must read lo:hi:step, got '{s}'");
    };
    Ok((lo, hi, step))
}

fn parse_list_sep<T: std::str::FromStr>(s: &str, sep: char) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(sep)
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad entry '{p}' in '{s}': {e}"))
        })
        .collect()
}

/// `"1:1,2:1"` → `[(1, 1), (2, 1)]`.
pub fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|p| match parse_list_sep::<usize>(p, ':')?[..] {
            [m, n] => Ok((m, n)),
            _ => bail!("expected m:n, got '{p}'"),
        })
        .collect()
}

pub fn grid_points(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || ![lo, hi, step].iter().all(|v| v.is_finite()) {
        bail!("grid needs finite lo <= hi and step > 0, got {lo}:{hi}:{step}");
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        bail!("grid has {} points; the limit is 100000", count + 1);
    }
    Ok((0..=count).map(|i| lo + i as f64 * step).collect())
}
