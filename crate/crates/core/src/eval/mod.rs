//! Metrics over trial records, step-binned series, the Wilcoxon signed-rank
//! test, and report emission.

mod metrics;
mod report;
mod series;
mod wilcoxon;

pub use metrics::{summarize_metrics, MetricsRow, MetricsSummary, OVERALL};
pub use report::{emit_report, render_table, series_csv, ReportBundle, ReportFormat, REPORT_SCHEMA_VERSION};
pub use series::{step_series, SeriesRow, StepSeries};
pub use wilcoxon::{wilcoxon_signed_rank, PValueMethod, WilcoxonResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no trial records")]
    EmptyRecords,
    #[error("baseline variant {baseline} has no records for task {task}")]
    MissingBaseline { task: String, baseline: String },
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("need at least {needed} non-zero paired differences, got {got}")]
    TooFewPairs { needed: usize, got: usize },
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("bin width must be at least 1")]
    InvalidBinWidth,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
