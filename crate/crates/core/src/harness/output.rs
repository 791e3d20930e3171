//! CSV rows and JSON summaries.
//!
//! Attack CSV columns: `strategy, params, trials, successes, mean, stderr,
//! predicted, z`. Each report contributes one row, then one row per
//! breakdown entry with strategy `<strategy>/<entry>`. Formula CSV columns:
//! `formula, params, value, oracle, abs_diff`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::adversary::AttackReport;
use crate::analysis::FormulaRow;
use crate::error::{Error, Result};

use super::experiments::ExperimentResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub strategy: String,
    pub params: String,
    pub trials: u64,
    pub successes: u64,
    pub mean: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub z: f64,
}

fn row(strategy: String, params: &str, count: u64, total: u64, predicted: f64, z: f64) -> CsvRow {
    let mean = if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    };
    CsvRow {
        strategy,
        params: params.to_string(),
        trials: total,
        successes: count,
        mean,
        stderr: if total == 0 {
            0.0
        } else {
            (mean * (1.0 - mean) / total as f64).sqrt()
        },
        predicted,
        z,
    }
}

pub fn report_rows(r: &AttackReport) -> Vec<CsvRow> {
    let mut rows = vec![row(
        r.strategy.clone(),
        &r.params,
        r.successes,
        r.trials,
        r.predicted,
        r.z_score,
    )];
    for b in &r.breakdown {
        rows.push(row(
            format!("{}/{}", r.strategy, b.name),
            &r.params,
            b.count,
            b.total,
            b.predicted.unwrap_or(f64::NAN),
            b.z_score().unwrap_or(f64::NAN),
        ));
    }
    rows
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => Error::Io(format!("{other:?}")),
    }
}

pub fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn reports_csv(reports: &[AttackReport]) -> Result<String> {
    let rows: Vec<CsvRow> = reports.iter().flat_map(report_rows).collect();
    csv_string(&rows)
}

pub fn formulas_csv(rows: &[FormulaRow]) -> Result<String> {
    csv_string(rows)
}

pub fn summary_json(results: &[ExperimentResult]) -> Result<String> {
    serde_json::to_string_pretty(results).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// The CSV and, next to it, the JSON summary (`<stem>.json`).
pub fn write_artifacts(path: &Path, results: &[ExperimentResult]) -> Result<()> {
    let reports: Vec<AttackReport> = results.iter().map(|r| r.report.clone()).collect();
    write_text(path, &reports_csv(&reports)?)?;
    write_text(&path.with_extension("json"), &summary_json(results)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let r = AttackReport::new("demo", "n=4".into(), 10, 5, 0.5).with_breakdown(
            "part",
            3,
            4,
            Some(0.75),
        );
        let text = reports_csv(&[r]).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "strategy,params,trials,successes,mean,stderr,predicted,z"
        );
        assert_eq!(lines[1], "demo,n=4,10,5,0.5,0.15811388300841897,0.5,0.0");
        assert!(lines[2].starts_with("demo/part,n=4,4,3,0.75,"));
    }
}
