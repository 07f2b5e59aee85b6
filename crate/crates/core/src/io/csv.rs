//! Heatmap CSV files.
//!
//! ```text
//! elevation_deg \ azimuth_deg,0,10,20
//! 0,1.23456789e1,…
//! ```
//!
//! The top-left cell names the row axis and the column axis. Mean rates are
//! written with 9 significant digits; standard errors go to a companion
//! file `<path>.stderr.csv` of the same shape.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::rate::RateResult;
use crate::sweep::{Axis, AxisKind, HeatmapMetadata, RateHeatmap};

use super::write_file;

pub fn stderr_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".stderr.csv");
    PathBuf::from(s)
}

fn render(heatmap: &RateHeatmap, value: impl Fn(&RateResult) -> f64) -> String {
    let mut out = format!("{} \\ {}", heatmap.rows.kind.label(), heatmap.columns.kind.label());
    for v in &heatmap.columns.values {
        write!(out, ",{v}").unwrap();
    }
    out.push('\n');
    for (r, rv) in heatmap.rows.values.iter().enumerate() {
        write!(out, "{rv}").unwrap();
        for c in 0..heatmap.n_cols() {
            write!(out, ",{:.8e}", value(heatmap.cell(r, c))).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Mean-rate CSV text.
pub fn heatmap_csv(heatmap: &RateHeatmap) -> String {
    render(heatmap, |c| c.mean_rate)
}

/// Writes `path` and `<path>.stderr.csv`; returns both paths.
pub fn emit_heatmap_csv(heatmap: &RateHeatmap, path: &Path) -> Result<Vec<PathBuf>> {
    write_file(path, &heatmap_csv(heatmap))?;
    let companion = stderr_path(path);
    write_file(&companion, &render(heatmap, |c| c.std_error))?;
    Ok(vec![path.to_path_buf(), companion])
}

struct Table {
    rows: Axis,
    columns: Axis,
    values: Vec<f64>,
}

fn parse_table(text: &str, path: &Path) -> Result<Table> {
    let err = |line: usize, message: String| SimError::Config {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let mut fields = header.split(',');
    let corner = fields.next().unwrap_or_default();
    let (row_label, col_label) = corner
        .split_once('\\')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| err(1, format!("header cell {corner:?} is not `rows \\ columns`")))?;
    let axis_kind = |label: &str| {
        AxisKind::from_label(label).ok_or_else(|| err(1, format!("unknown axis {label:?}")))
    };
    let number = |line: usize, s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| err(line, format!("bad number {s:?}: {e}")))
    };
    let columns = Axis {
        kind: axis_kind(col_label)?,
        values: fields.map(|f| number(1, f)).collect::<Result<_>>()?,
    };
    let mut rows = Axis {
        kind: axis_kind(row_label)?,
        values: Vec::new(),
    };
    let mut values = Vec::new();
    for (i, line) in lines {
        let mut fields = line.split(',');
        rows.values.push(number(i + 1, fields.next().unwrap_or_default())?);
        let before = values.len();
        for f in fields {
            values.push(number(i + 1, f)?);
        }
        if values.len() - before != columns.values.len() {
            return Err(err(
                i + 1,
                format!("expected {} cells, found {}", columns.values.len(), values.len() - before),
            ));
        }
    }
    Ok(Table { rows, columns, values })
}

/// Reads a heatmap CSV back. Standard errors come from the companion file
/// when it exists and are zero otherwise; `realizations_used` is not stored
/// and reads as 0.
pub fn parse_heatmap_csv(path: &Path) -> Result<RateHeatmap> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let means = parse_table(&text, path)?;
    let companion = stderr_path(path);
    let errors = match std::fs::read_to_string(&companion) {
        Ok(t) => {
            let table = parse_table(&t, &companion)?;
            if table.values.len() != means.values.len() {
                return Err(SimError::Config {
                    path: companion,
                    message: "shape differs from the mean-rate file".into(),
                });
            }
            table.values
        }
        Err(_) => vec![0.0; means.values.len()],
    };
    let cells = means
        .values
        .iter()
        .zip(&errors)
        .map(|(m, s)| RateResult { mean_rate: *m, std_error: *s, realizations_used: 0 })
        .collect();
    RateHeatmap::new(means.columns, means.rows, cells, HeatmapMetadata::default())
}
