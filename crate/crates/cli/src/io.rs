//! Dataset and coreset file formats.
//!
//! Points: UTF-8 CSV, one point per row with `d` comma-separated decimal
//! floats, optionally followed by a weight column (`--weighted`). Lines
//! starting with `#` are comments; `--header` skips the first data row.
//!
//! Coresets: CSV rows `index,weight` with 1-based indices. Floats are
//! printed with Rust's shortest round-trip formatting, so files are
//! byte-stable across runs.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use meancore::{CoresetWeights, WeightedSet};

pub fn read_points(path: &Path, weighted: bool, header: bool) -> Result<WeightedSet> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read points file {}", path.display()))?;
    let mut data: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut skipped_header = !header;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !skipped_header {
            skipped_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let want_cols = fields.len();
        let d = if weighted { want_cols - 1 } else { want_cols };
        if d == 0 {
            bail!("{}:{}: no coordinate columns", path.display(), lineno + 1);
        }
        match dim {
            None => dim = Some(d),
            Some(prev) if prev != d => bail!(
                "{}:{}: row has {} coordinates, previous rows had {}",
                path.display(),
                lineno + 1,
                d,
                prev
            ),
            _ => {}
        }
        for (col, field) in fields.iter().take(d).enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                anyhow!(
                    "{}:{}: column {} is not a number: {field:?}",
                    path.display(),
                    lineno + 1,
                    col + 1
                )
            })?;
            data.push(v);
        }
        if weighted {
            let w: f64 = fields[d].parse().map_err(|_| {
                anyhow!(
                    "{}:{}: weight column is not a number: {:?}",
                    path.display(),
                    lineno + 1,
                    fields[d]
                )
            })?;
            weights.push(w);
        } else {
            weights.push(1.0);
        }
    }
    let dim = dim.ok_or_else(|| anyhow!("{}: no data rows", path.display()))?;
    WeightedSet::new(data, dim, weights)
        .map_err(|e| anyhow!("{}: invalid point set: {e}", path.display()))
}

pub fn write_points(path: &Path, set: &WeightedSet, weighted: bool) -> Result<()> {
    let mut out = String::new();
    for i in 0..set.len() {
        let row: Vec<String> = set.point(i).iter().map(|c| format!("{c}")).collect();
        out.push_str(&row.join(","));
        if weighted {
            out.push(',');
            out.push_str(&format!("{}", set.weight(i)));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Reads an `index,weight` coreset over a source of `n` points. Out-of-range
/// indices are data corruption.
pub fn read_coreset(path: &Path, n: usize) -> Result<CoresetWeights> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read coreset file {}", path.display()))?;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (idx, w) = line.split_once(',').ok_or_else(|| {
            anyhow!(
                "{}:{}: expected `index,weight`",
                path.display(),
                lineno + 1
            )
        })?;
        let idx: usize = idx.trim().parse().map_err(|_| {
            anyhow!("{}:{}: bad index {idx:?}", path.display(), lineno + 1)
        })?;
        let w: f64 = w.trim().parse().map_err(|_| {
            anyhow!("{}:{}: bad weight {w:?}", path.display(), lineno + 1)
        })?;
        if idx == 0 || idx > n {
            bail!(
                "{}:{}: index {idx} out of range [1, {n}] (corrupt coreset?)",
                path.display(),
                lineno + 1
            );
        }
        entries.push((idx - 1, w));
    }
    CoresetWeights::from_entries(n, entries)
        .map_err(|e| anyhow!("{}: invalid coreset: {e}", path.display()))
}

pub fn write_coreset(path: &Path, u: &CoresetWeights) -> Result<()> {
    let mut out = String::new();
    for (i, w) in u.iter() {
        out.push_str(&format!("{},{w}\n", i + 1));
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// The `--algo stats` output: a single CSV row `s0, s1_1..s1_d, s2`.
pub fn write_summary(path: &Path, s: &meancore::MomentSummary) -> Result<()> {
    let mut fields = vec![format!("{}", s.s0)];
    fields.extend(s.weighted_sum().coords().iter().map(|c| format!("{c}")));
    fields.push(format!("{}", s.s2));
    fs::write(path, fields.join(",") + "\n")
        .with_context(|| format!("cannot write {}", path.display()))
}
