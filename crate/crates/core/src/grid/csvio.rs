//! Grid dump format: header `i1,…,i_{2n},value`, one row per point in row-major
//! order, values written with 17 significant digits (`{:.16e}`).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::domain::DomainSpec;
use super::function::GridFunction;
use crate::error::{Error, Result};

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn grid_to_csv_string(u: &GridFunction) -> String {
    let d = u.domain();
    let m = d.real_dim();
    let mut s = String::with_capacity(d.num_points() * (m * 4 + 26));
    for a in 1..=m {
        let _ = write!(s, "i{a},");
    }
    s.push_str("value\n");
    for p in 0..d.num_points() {
        let c = d.coords(p);
        for &i in &c[..m] {
            let _ = write!(s, "{i},");
        }
        s.push_str(&format_value(u.get(p)));
        s.push('\n');
    }
    s
}

pub fn write_grid_csv(u: &GridFunction, path: &Path) -> Result<()> {
    fs::write(path, grid_to_csv_string(u)).map_err(|e| Error::io(path, e))
}

/// A parsed grid dump without geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct RawGrid {
    pub real_dim: usize,
    pub axis_len: usize,
    pub values: Vec<f64>,
}

pub fn parse_grid_csv(text: &str) -> Result<RawGrid> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::GridCsv("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let m = cols.len().saturating_sub(1);
    let expected: Vec<String> = (1..=m).map(|a| format!("i{a}")).chain(["value".into()]).collect();
    if m == 0 || m % 2 != 0 || cols != expected {
        return Err(Error::GridCsv(format!("bad header `{header}`")));
    }
    let mut rows: Vec<(Vec<usize>, f64)> = Vec::new();
    for (ln, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != m + 1 {
            return Err(Error::GridCsv(format!("row {}: expected {} fields", ln + 2, m + 1)));
        }
        let idx = f[..m]
            .iter()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::GridCsv(format!("row {}: {e}", ln + 2)))?;
        let v: f64 = f[m]
            .parse()
            .map_err(|e| Error::GridCsv(format!("row {}: {e}", ln + 2)))?;
        rows.push((idx, v));
    }
    let axis_len = rows
        .iter()
        .flat_map(|(i, _)| i.iter().copied())
        .max()
        .map_or(0, |x| x + 1);
    let total = axis_len.pow(m as u32);
    if rows.len() != total {
        return Err(Error::GridCsv(format!(
            "expected {total} rows for a {m}-axis grid of side {axis_len}, got {}",
            rows.len()
        )));
    }
    let mut values = vec![f64::NAN; total];
    for (idx, v) in rows {
        let p = idx.iter().fold(0, |acc, &i| acc * axis_len + i);
        if !values[p].is_nan() {
            return Err(Error::GridCsv(format!("duplicate row for index {idx:?}")));
        }
        values[p] = v;
    }
    Ok(RawGrid {
        real_dim: m,
        axis_len,
        values,
    })
}

/// Reads a dump and checks it against `domain`.
pub fn read_grid_csv(path: &Path, domain: &DomainSpec) -> Result<GridFunction> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw = parse_grid_csv(&text)?;
    if raw.real_dim != domain.real_dim() || raw.axis_len != domain.axis_len() {
        return Err(Error::GridCsv(format!(
            "{}: grid has {} axes of length {}, domain expects {} of length {}",
            path.display(),
            raw.real_dim,
            raw.axis_len,
            domain.real_dim(),
            domain.axis_len()
        )));
    }
    GridFunction::new(domain.clone(), raw.values)
}
