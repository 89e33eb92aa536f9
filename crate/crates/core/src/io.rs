//! Artifact serialization: CSV fields and traces, JSON reports and a
//! MatrixMarket dump of assembled systems.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value reads back bit-identically.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::benchmark::{BenchReport, CrossSection, Summary};
use crate::grid::{Field, Grid2D, Rect};
use crate::iteration::IterationReport;
use crate::qr_solver::WeightedLeastSquares;
use crate::{Error, Result};

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `x,y,value` with one row per node, row-major.
pub fn field_to_csv(u: &Field) -> String {
    let grid = u.grid();
    let mut s = String::from("x,y,value\n");
    for (k, v) in u.values().iter().enumerate() {
        let p = grid.point_at(k);
        let _ = writeln!(s, "{},{},{}", p[0], p[1], v);
    }
    s
}

pub fn write_field_csv(path: &Path, u: &Field) -> Result<()> {
    write(path, &field_to_csv(u))
}

/// Reads a file written by [`write_field_csv`]; the grid is recovered from
/// the distinct coordinates.
pub fn read_field_csv(path: &Path) -> Result<Field> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse { path: path.into(), line, message };
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(parse_err(n + 1, format!("expected 3 columns, got {}", cols.len())));
        }
        let mut vals = [0.0; 3];
        for (v, c) in vals.iter_mut().zip(&cols) {
            *v = c.trim().parse().map_err(|e| parse_err(n + 1, format!("`{c}`: {e}")))?;
        }
        rows.push(vals);
    }
    let distinct = |axis: usize| {
        let mut v: Vec<f64> = rows.iter().map(|r| r[axis]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (xs, ys) = (distinct(0), distinct(1));
    if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != rows.len() {
        return Err(parse_err(0, "nodes do not form a tensor grid".into()));
    }
    let bounds = Rect::new(xs[0], xs[xs.len() - 1], ys[0], ys[ys.len() - 1]);
    let grid = Grid2D::new(xs.len(), ys.len(), bounds)?;
    Field::new(grid, rows.iter().map(|r| r[2]).collect())
}

/// `t,u_true,u_comp`.
pub fn section_to_csv(cs: &CrossSection) -> String {
    let mut s = String::from("t,u_true,u_comp\n");
    for [t, a, b] in &cs.samples {
        let _ = writeln!(s, "{t},{a},{b}");
    }
    s
}

/// `n,increment,residual`; the increment column is empty for `n = 0`.
pub fn history_to_csv(report: &IterationReport) -> String {
    let mut s = String::from("n,increment,residual\n");
    for r in &report.records {
        let inc = r.increment_l2.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{}", r.n, inc, r.residual_l2);
    }
    s
}

/// `{test, params, iterations: [...], converged, theta_hat}` plus the
/// error metrics and checks.
pub fn report_json(report: &BenchReport) -> serde_json::Value {
    let iterations: Vec<_> = report
        .iteration
        .records
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "increment_l2": r.increment_l2,
                "residual_l2": r.residual_l2,
                "error_weighted": r.error_weighted,
                "wall_ms": r.wall_ms,
            })
        })
        .collect();
    json!({
        "test": report.test,
        "params": report.config,
        "iterations": iterations,
        "converged": report.iteration.converged,
        "stagnated": report.iteration.stagnated,
        "theta_hat": report.iteration.theta_hat,
        "rel_linf_error": report.rel_linf_error,
        "fraction_below_3pct": report.fraction_below,
        "cross_section_line": report.cross_section.as_ref().map(|c| c.snapped),
        "checks": report.checks,
        "failure": report.failure,
        "passed": report.passed,
    })
}

pub fn to_pretty_json<T: Serialize>(value: &T, context: &str) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|source| Error::Json { context: context.into(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &to_pretty_json(value, &path.display().to_string())?)
}

/// Writes `<id>_solution.csv`, `<id>_error.csv`, `<id>_section.csv`,
/// `<id>_history.csv` and `<id>_report.json` into `dir`.
pub fn write_bench_artifacts(dir: &Path, report: &BenchReport) -> Result<()> {
    let id = report.test.as_str();
    if let Some(u) = &report.solution {
        write_field_csv(&dir.join(format!("{id}_solution.csv")), u)?;
    }
    if let Some(e) = &report.error_field {
        write_field_csv(&dir.join(format!("{id}_error.csv")), e)?;
    }
    if let Some(cs) = &report.cross_section {
        write(&dir.join(format!("{id}_section.csv")), &section_to_csv(cs))?;
    }
    write(&dir.join(format!("{id}_history.csv")), &history_to_csv(&report.iteration))?;
    write_json(&dir.join(format!("{id}_report.json")), &report_json(report))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    write_json(path, summary)
}

/// MatrixMarket coordinate form of the weighted matrix `W A` (1-based).
pub fn matrix_market(sys: &WeightedLeastSquares) -> String {
    let a = sys.matrix();
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for (r, c, v) in a.triplets() {
        let _ = writeln!(s, "{} {} {}", r + 1, c + 1, v * sys.weights()[r]);
    }
    s
}

/// The weighted right-hand side `W b`, one value per line.
pub fn rhs_text(sys: &WeightedLeastSquares) -> String {
    let mut s = String::new();
    for (b, w) in sys.rhs().iter().zip(sys.weights()) {
        let _ = writeln!(s, "{}", b * w);
    }
    s
}

/// Writes `<stem>.mtx` and `<stem>_rhs.txt`.
pub fn dump_system(dir: &Path, stem: &str, sys: &WeightedLeastSquares) -> Result<()> {
    write(&dir.join(format!("{stem}.mtx")), &matrix_market(sys))?;
    write(&dir.join(format!("{stem}_rhs.txt")), &rhs_text(sys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::square(7, Rect::default()).unwrap();
        let u = Field::from_fn(g, |p| (p[0] * 3.1).sin() + p[1] / 7.0).unwrap();
        let path = dir.path().join("u.csv");
        write_field_csv(&path, &u).unwrap();
        let back = read_field_csv(&path).unwrap();
        assert_eq!(back.values(), u.values());
        assert_eq!(back.grid().nx(), 7);
    }

    #[test]
    fn malformed_csv_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "x,y,value\n0,0,1\n1,0,oops\n").unwrap();
        match read_field_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
