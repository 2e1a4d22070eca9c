use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::agent::{TrialRecord, Variant};
use crate::domains::DomainKind;

/// Task label of the cross-task average rows.
pub const OVERALL: &str = "Overall";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub task: String,
    pub variant: Variant,
    pub trials: usize,
    /// Percent of trials that reached progress 1.
    pub success_rate: f64,
    /// Mean of per-trial maximum progress, in percent.
    pub progress_rate: f64,
    /// Mean of per-trial final progress, in percent.
    pub final_progress_rate: f64,
    /// Failed trials count the full step budget.
    pub avg_steps: f64,
    /// Mean over trials of each trial's mean per-step prompt tokens.
    pub context_tokens_mean: f64,
    pub context_relative: Option<f64>,
    pub time_ms_mean: f64,
    pub time_relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub baseline: Option<Variant>,
    /// Per (task, variant), ordered by task then variant.
    pub rows: Vec<MetricsRow>,
    /// Unweighted mean across tasks, one row per variant.
    pub overall: Vec<MetricsRow>,
}

impl MetricsSummary {
    pub fn row(&self, task: &str, variant: Variant) -> Option<&MetricsRow> {
        self.rows
            .iter()
            .chain(&self.overall)
            .find(|r| r.task == task && r.variant == variant)
    }

    pub fn tasks(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.task.as_str()) {
                out.push(&r.task);
            }
        }
        out
    }
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn relative(value: f64, base: f64) -> Option<f64> {
    (base > 0.0).then(|| 100.0 * value / base)
}

fn row_for(task: DomainKind, variant: Variant, group: &[&TrialRecord]) -> MetricsRow {
    MetricsRow {
        task: task.name().to_string(),
        variant,
        trials: group.len(),
        success_rate: 100.0 * group.iter().filter(|r| r.success).count() as f64 / group.len() as f64,
        progress_rate: 100.0 * mean(group.iter().map(|r| r.max_progress)),
        final_progress_rate: 100.0 * mean(group.iter().map(|r| r.final_progress)),
        avg_steps: mean(
            group
                .iter()
                .map(|r| if r.success { r.steps_used } else { r.max_steps } as f64),
        ),
        context_tokens_mean: mean(group.iter().map(|r| r.mean_context_tokens())),
        context_relative: None,
        time_ms_mean: mean(group.iter().map(|r| r.total_wall_ms)),
        time_relative: None,
    }
}

fn mean_opt(xs: &[Option<f64>]) -> Option<f64> {
    xs.iter().copied().collect::<Option<Vec<f64>>>().map(mean)
}

pub fn summarize_metrics(records: &[TrialRecord], baseline: Option<Variant>) -> Result<MetricsSummary, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyRecords);
    }
    let mut groups: BTreeMap<(DomainKind, Variant), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.task, r.variant)).or_default().push(r);
    }
    let mut rows: Vec<MetricsRow> = groups.iter().map(|(&(t, v), g)| row_for(t, v, g)).collect();

    if let Some(b) = baseline {
        let mut base: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for r in rows.iter().filter(|r| r.variant == b) {
            base.insert(r.task.clone(), (r.context_tokens_mean, r.time_ms_mean));
        }
        for r in &mut rows {
            let &(ctx, time) = base.get(&r.task).ok_or_else(|| EvalError::MissingBaseline {
                task: r.task.clone(),
                baseline: b.to_string(),
            })?;
            r.context_relative = relative(r.context_tokens_mean, ctx);
            r.time_relative = relative(r.time_ms_mean, time);
        }
    }

    let mut overall = Vec::new();
    for v in Variant::ALL {
        let of_v: Vec<&MetricsRow> = rows.iter().filter(|r| r.variant == v).collect();
        if of_v.is_empty() {
            continue;
        }
        let avg = |f: fn(&MetricsRow) -> f64| mean(of_v.iter().map(|r| f(r)));
        overall.push(MetricsRow {
            task: OVERALL.to_string(),
            variant: v,
            trials: of_v.iter().map(|r| r.trials).sum(),
            success_rate: avg(|r| r.success_rate),
            progress_rate: avg(|r| r.progress_rate),
            final_progress_rate: avg(|r| r.final_progress_rate),
            avg_steps: avg(|r| r.avg_steps),
            context_tokens_mean: avg(|r| r.context_tokens_mean),
            context_relative: mean_opt(&of_v.iter().map(|r| r.context_relative).collect::<Vec<_>>()),
            time_ms_mean: avg(|r| r.time_ms_mean),
            time_relative: mean_opt(&of_v.iter().map(|r| r.time_relative).collect::<Vec<_>>()),
        });
    }
    Ok(MetricsSummary { baseline, rows, overall })
}
