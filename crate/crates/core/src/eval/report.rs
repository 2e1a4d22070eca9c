use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{EvalError, MetricsRow, MetricsSummary, StepSeries, OVERALL};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Table, ReportFormat::Csv, ReportFormat::Json];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub summary: MetricsSummary,
    pub series: StepSeries,
}

fn signed(delta: f64) -> String {
    // avoid "-0.00"
    let d = if delta.abs() < 0.005 { 0.0 } else { delta };
    format!("{d:+.2}")
}

fn cell(value: f64, base: Option<f64>) -> String {
    match base {
        Some(b) => format!("{value:.2} ({})", signed(value - b)),
        None => format!("{value:.2}"),
    }
}

fn pct_cell(value: Option<f64>, is_baseline: bool) -> String {
    match value {
        None => "-".into(),
        Some(v) if is_baseline => format!("{v:.2}%"),
        Some(v) => format!("{v:.2}% ({}%)", signed(v - 100.0)),
    }
}

fn block(out: &mut String, title: &str, rows: &[&MetricsRow], summary: &MetricsSummary) {
    let _ = writeln!(out, "{title}");
    let base = summary
        .baseline
        .and_then(|b| rows.iter().find(|r| r.variant == b).copied());
    for r in rows {
        let is_base = Some(r.variant) == summary.baseline;
        let b = if is_base { None } else { base };
        let _ = writeln!(
            out,
            "{:<12}{:<18}{:<18}{:<18}{:<20}{}",
            r.variant.name(),
            cell(r.success_rate, b.map(|b| b.success_rate)),
            cell(r.progress_rate, b.map(|b| b.progress_rate)),
            cell(r.avg_steps, b.map(|b| b.avg_steps)),
            pct_cell(r.context_relative, is_base),
            pct_cell(r.time_relative, is_base),
        );
    }
}

/// Fixed-width table: one block per task, then an Overall block. Non-baseline
/// rows carry their difference from the baseline in parentheses.
pub fn render_table(summary: &MetricsSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12}{:<18}{:<18}{:<18}{:<20}{}",
        "", "SR", "PR", "Steps", "Context", "Time"
    );
    for task in summary.tasks() {
        let rows: Vec<&MetricsRow> = summary.rows.iter().filter(|r| r.task == task).collect();
        out.push('\n');
        let mut title = task.to_string();
        title[..1].make_ascii_uppercase();
        block(&mut out, &title, &rows, summary);
    }
    out.push('\n');
    let overall: Vec<&MetricsRow> = summary.overall.iter().collect();
    block(&mut out, OVERALL, &overall, summary);
    out
}

/// `task,variant,bin_start,value` rows; `value` empty for an unoccupied bin.
pub fn series_csv(series: &StepSeries, executability: bool) -> String {
    let mut out = String::from("task,variant,bin_start,value\n");
    for r in &series.rows {
        let value = if executability {
            r.executability.map(|v| format!("{v:.6}")).unwrap_or_default()
        } else {
            format!("{:.6}", r.progress)
        };
        let _ = writeln!(out, "{},{},{},{}", r.task, r.variant.name(), r.bin_start, value);
    }
    out
}

/// Writes the requested formats into `dir` and returns the paths written:
/// `report.txt`, `progress_by_step.csv`, `executability_by_step.csv`,
/// `report.json`.
pub fn emit_report(
    summary: &MetricsSummary,
    series: &StepSeries,
    dir: &Path,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>, EvalError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<(), EvalError> {
        let p = dir.join(name);
        fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            ReportFormat::Table => put("report.txt", render_table(summary))?,
            ReportFormat::Csv => {
                put("progress_by_step.csv", series_csv(series, false))?;
                put("executability_by_step.csv", series_csv(series, true))?;
            }
            ReportFormat::Json => {
                let bundle = ReportBundle {
                    schema_version: REPORT_SCHEMA_VERSION,
                    summary: summary.clone(),
                    series: series.clone(),
                };
                let mut text = serde_json::to_string_pretty(&bundle).expect("bundle serializes");
                text.push('\n');
                put("report.json", text)?;
            }
        }
    }
    Ok(written)
}
