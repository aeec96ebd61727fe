//! CSV and manifest writers. Numbers are written with 17 significant digits
//! and `\n` line endings so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use cavity_core::series::TimeSeries;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Renders `series` as CSV text; refuses non-finite values.
pub fn render_series(series: &TimeSeries) -> Result<String> {
    let mut out = String::new();
    out.push_str(&series.time_label);
    for c in series.columns() {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, (t, row)) in series.times().iter().zip(series.rows()).enumerate() {
        if !t.is_finite() {
            return Err(CliError::NonFinite { column: series.time_label.clone(), row: i });
        }
        out.push_str(&number(*t));
        for (c, v) in series.columns().iter().zip(row) {
            if !v.is_finite() {
                return Err(CliError::NonFinite { column: c.clone(), row: i });
            }
            let _ = write!(out, ",{}", number(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_series(series: &TimeSeries, path: &Path) -> Result<()> {
    write_file(path, &render_series(series)?)
}

/// A jump event for the separate jump-record file.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRow {
    pub trajectory: usize,
    pub time: f64,
    pub channel: &'static str,
}

pub fn write_jumps(rows: &[JumpRow], path: &Path) -> Result<()> {
    let mut out = String::from("trajectory,t,channel\n");
    for (i, r) in rows.iter().enumerate() {
        if !r.time.is_finite() {
            return Err(CliError::NonFinite { column: "t".into(), row: i });
        }
        let _ = writeln!(out, "{},{},{}", r.trajectory, number(r.time), r.channel);
    }
    write_file(path, &out)
}

/// Provenance written next to every run's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub code_version: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub results: BTreeMap<String, f64>,
    pub notes: BTreeMap<String, String>,
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    write_file(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        (header, rows)
    }

    #[test]
    fn one_row_round_trips() {
        let mut s = TimeSeries::new(["a", "b"]);
        let row = vec![std::f64::consts::PI, -1.0 / 3.0];
        s.push(0.1, row.clone()).unwrap();
        let text = render_series(&s).unwrap();
        let (header, rows) = parse(&text);
        assert_eq!(header, ["t", "a", "b"]);
        assert_eq!(header.len(), s.columns().len() + 1);
        assert_eq!(rows, vec![vec![0.1, row[0], row[1]]]);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn non_finite_values_are_refused() {
        let mut s = TimeSeries::new(["a"]);
        s.push(0.0, vec![1.0]).unwrap();
        s.push(0.1, vec![f64::NAN]).unwrap();
        let err = render_series(&s).unwrap_err();
        assert!(matches!(err, CliError::NonFinite { row: 1, .. }));
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(number(0.1), "1.0000000000000001e-1");
        assert_eq!(number(1.0).parse::<f64>().unwrap(), 1.0);
    }
}
