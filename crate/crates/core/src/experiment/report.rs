//! Emits a finished report: one CSV with the fixed column set, a JSON
//! mirror of the whole report, and one small plot CSV per series.
//!
//! Cells print through f64's shortest-roundtrip Display, so files are
//! byte-stable across runs and parse back to the same numbers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::experiment::runner::ExperimentReport;
use crate::Result;

pub const CSV_HEADER: &str = "k,degree,cond,sup_err_E,k_l2_ratio,k_sup_ratio,\
k_agmon_ratio_a1,k_agmon_ratio_a2,bm_lhs,bm_rhs_l2,bm_rhs_f";

fn push_cell(out: &mut String, value: Option<f64>) {
    out.push(',');
    if let Some(v) = value {
        let _ = write!(out, "{v}");
    }
}

/// The main table, one row per k. Ratio columns carry the k-multiplied
/// values, matching their names.
pub fn render_csv(report: &ExperimentReport) -> String {
    let mut out = String::with_capacity(64 * (report.per_k.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.per_k {
        let _ = write!(out, "{},{},{}", r.k, r.basis_degree, r.gram_condition);
        push_cell(&mut out, Some(r.sup_err_e));
        push_cell(&mut out, Some(r.k * r.l2_ratio));
        push_cell(&mut out, Some(r.k * r.sup_ratio));
        push_cell(&mut out, r.agmon_ratios.first().map(|e| r.k * e.ratio));
        push_cell(&mut out, r.agmon_ratios.get(1).map(|e| r.k * e.ratio));
        push_cell(&mut out, Some(r.bm_lhs));
        push_cell(&mut out, Some(r.bm_rhs_l2_term));
        push_cell(&mut out, Some(r.bm_rhs_f_term));
        out.push('\n');
    }
    out
}

pub fn render_series_csv(points: &[crate::experiment::runner::SeriesPoint]) -> String {
    let mut out = String::from("k,value\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.k, p.value);
    }
    out
}

pub fn render_json(report: &ExperimentReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn resolve(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)?;
    Ok(())
}

/// Writes the CSV, the JSON, and the plot files named in the report's
/// own config, all relative paths resolved against `out_dir` when given.
/// Returns the written paths.
pub fn emit(report: &ExperimentReport, out_dir: Option<&Path>) -> Result<Vec<PathBuf>> {
    let output = &report.config.output;
    let mut written = Vec::new();

    let csv_path = resolve(&output.csv_path, out_dir);
    write_file(&csv_path, &render_csv(report))?;
    written.push(csv_path);

    let json_path = resolve(&output.json_path, out_dir);
    write_file(&json_path, &render_json(report)?)?;
    written.push(json_path);

    for (name, points) in &report.series {
        let path = resolve(
            Path::new(&format!("{}_{}.csv", output.plot_prefix, name)),
            out_dir,
        );
        write_file(&path, &render_series_csv(points))?;
        written.push(path);
    }

    Ok(written)
}
