use serde::{Deserialize, Serialize};

use super::metrics::{metrics, Metrics};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::training::TrainedModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub predicted_positives: usize,
}

/// Operating points for three priorities. Each pick is an index into `rows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPicks {
    /// Largest threshold that still attains the maximal recall.
    pub max_recall: usize,
    /// Highest accuracy; smallest threshold on ties.
    pub max_accuracy: usize,
    /// Largest threshold with maximal precision among rows with at least one
    /// positive prediction.
    pub max_precision: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub rows: Vec<ThresholdRow>,
    pub picks: ThresholdPicks,
}

impl ThresholdReport {
    pub fn row_at(&self, threshold: f64) -> Option<&ThresholdRow> {
        self.rows.iter().find(|r| (r.threshold - threshold).abs() < 1e-12)
    }

    pub fn markdown(&self) -> String {
        let mut out = String::from("| threshold | accuracy | precision | recall |\n|---|---|---|---|\n");
        for r in &self.rows {
            out.push_str(&format!(
                "| {:.2} | {:.2}% | {:.2}% | {:.2}% |\n",
                r.threshold,
                100.0 * r.accuracy,
                100.0 * r.precision,
                100.0 * r.recall
            ));
        }
        let p = &self.picks;
        let fmt = |i: usize| format!("{:.2}", self.rows[i].threshold);
        out.push_str(&format!("\nmax recall: {}\nmax accuracy: {}\n", fmt(p.max_recall), fmt(p.max_accuracy)));
        out.push_str(&format!(
            "max precision: {}\n",
            p.max_precision.map(fmt).unwrap_or_else(|| "none".into())
        ));
        out
    }
}

/// `0, step, 2·step, …` up to and including 1.
pub fn threshold_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::Config(format!("threshold step {step} must lie in (0, 0.5]")));
    }
    let k = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=k).map(|i| (i as f64 * step).min(1.0)).collect();
    if 1.0 - grid[k] > 1e-9 {
        grid.push(1.0);
    } else {
        grid[k] = 1.0;
    }
    Ok(grid)
}

/// Metrics of raw scores over the threshold grid, with scenario picks.
pub fn sweep_scores<T: Scalar>(scores: &[T], labels: &[bool], step: f64) -> Result<ThresholdReport> {
    let rows: Vec<ThresholdRow> = threshold_grid(step)?
        .into_iter()
        .map(|t| metrics(scores, labels, t).map(|m: Metrics| ThresholdRow {
            threshold: t,
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            predicted_positives: m.predicted_positives(),
        }))
        .collect::<Result<_>>()?;

    let best_recall = rows.iter().map(|r| r.recall).fold(f64::NEG_INFINITY, f64::max);
    let max_recall = rows.iter().rposition(|r| r.recall == best_recall).expect("non-empty grid");
    let mut max_accuracy = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.accuracy > rows[max_accuracy].accuracy {
            max_accuracy = i;
        }
    }
    let best_precision = rows
        .iter()
        .filter(|r| r.predicted_positives > 0)
        .map(|r| r.precision)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_precision = rows.iter().rposition(|r| r.predicted_positives > 0 && r.precision == best_precision);
    Ok(ThresholdReport { rows, picks: ThresholdPicks { max_recall, max_accuracy, max_precision } })
}

pub fn threshold_sweep<T: Scalar>(model: &TrainedModel<T>, data: &Dataset<T>, step: f64) -> Result<ThresholdReport> {
    sweep_scores(&model.predict(data)?, data.labels(), step)
}
