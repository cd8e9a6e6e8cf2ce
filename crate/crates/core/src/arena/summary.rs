//! Early-training comparison of two runs from their metrics rows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pipeline::MetricsRecord;

/// Training-progress axis a horizon is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgressAxis {
    ElapsedSeconds,
    Steps,
}

impl ProgressAxis {
    pub const ALL: [ProgressAxis; 2] = [ProgressAxis::ElapsedSeconds, ProgressAxis::Steps];

    pub fn of(self, row: &MetricsRecord) -> f64 {
        match self {
            ProgressAxis::ElapsedSeconds => row.elapsed_seconds,
            ProgressAxis::Steps => row.steps as f64,
        }
    }
}

impl fmt::Display for ProgressAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProgressAxis::ElapsedSeconds => "elapsed_seconds",
            ProgressAxis::Steps => "steps",
        })
    }
}

/// Mean benchmark win ratio of each run up to a shared horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyComparison {
    pub axis: ProgressAxis,
    pub horizon: f64,
    pub baseline: Option<f64>,
    pub curriculum: Option<f64>,
}

impl EarlyComparison {
    /// The curriculum run's early mean is at least the baseline's.
    pub fn curriculum_ahead(&self) -> bool {
        matches!((self.curriculum, self.baseline), (Some(c), Some(b)) if c >= b)
    }
}

/// Benchmark rows against `opponent`, including rows flagged with sampled
/// openings.
pub fn bench_rows<'a>(rows: &'a [MetricsRecord], opponent: &'a str) -> impl Iterator<Item = &'a MetricsRecord> {
    rows.iter().filter(move |r| {
        r.win_ratio.is_some()
            && (r.opponent == opponent || r.opponent.strip_prefix(opponent) == Some("+sampled_openings"))
    })
}

/// Mean win ratio of the benchmark rows at or before `horizon`.
pub fn mean_win_ratio_until(rows: &[MetricsRecord], opponent: &str, axis: ProgressAxis, horizon: f64) -> Option<f64> {
    let ratios: Vec<f64> = bench_rows(rows, opponent)
        .filter(|r| axis.of(r) <= horizon)
        .filter_map(|r| r.win_ratio)
        .collect();
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// Compares the runs over the first `fraction` of the shorter run's final
/// training progress, on each axis.
pub fn compare_early(
    baseline: &[MetricsRecord],
    curriculum: &[MetricsRecord],
    opponent: &str,
    fraction: f64,
) -> Vec<EarlyComparison> {
    let last = |rows: &[MetricsRecord], axis: ProgressAxis| {
        rows.iter()
            .filter(|r| r.is_training())
            .map(|r| axis.of(r))
            .fold(0.0, f64::max)
    };
    ProgressAxis::ALL
        .iter()
        .map(|&axis| {
            let horizon = fraction * last(baseline, axis).min(last(curriculum, axis));
            EarlyComparison {
                axis,
                horizon,
                baseline: mean_win_ratio_until(baseline, opponent, axis, horizon),
                curriculum: mean_win_ratio_until(curriculum, opponent, axis, horizon),
            }
        })
        .collect()
}
