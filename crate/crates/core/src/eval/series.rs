use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::agent::{TrialRecord, Variant};
use crate::domains::DomainKind;

/// One step bin for one (task, variant). Bin `b` covers steps
/// `bin_start ..= bin_start + bin_width - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub task: String,
    pub variant: Variant,
    pub bin_start: usize,
    /// Mean over trials of the best progress reached by the end of the bin.
    pub progress: f64,
    pub actions: usize,
    pub executable: usize,
    /// `executable / actions`, pooled across trials; `None` for an empty bin.
    pub executability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSeries {
    pub bin_width: usize,
    pub rows: Vec<SeriesRow>,
}

pub fn step_series(records: &[TrialRecord], bin_width: usize) -> Result<StepSeries, EvalError> {
    if bin_width == 0 {
        return Err(EvalError::InvalidBinWidth);
    }
    let mut groups: BTreeMap<(DomainKind, Variant), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.task, r.variant)).or_default().push(r);
    }
    let mut rows = Vec::new();
    for ((task, variant), group) in groups {
        let max_steps = group.iter().map(|r| r.max_steps.max(r.steps_used)).max().unwrap_or(0);
        let bins = max_steps.div_ceil(bin_width);
        for b in 0..bins {
            let lo = b * bin_width + 1;
            let hi = lo + bin_width - 1;
            let mut progress_sum = 0.0;
            let (mut actions, mut executable) = (0, 0);
            for r in &group {
                let best = r
                    .per_step
                    .iter()
                    .take_while(|s| s.step_index <= hi)
                    .map(|s| s.progress)
                    .fold(r.initial_progress, f64::max);
                progress_sum += best;
                for s in r.per_step.iter().filter(|s| (lo..=hi).contains(&s.step_index)) {
                    actions += 1;
                    executable += s.executable as usize;
                }
            }
            rows.push(SeriesRow {
                task: task.name().to_string(),
                variant,
                bin_start: lo,
                progress: progress_sum / group.len() as f64,
                actions,
                executable,
                executability: (actions > 0).then(|| executable as f64 / actions as f64),
            });
        }
    }
    Ok(StepSeries { bin_width, rows })
}
