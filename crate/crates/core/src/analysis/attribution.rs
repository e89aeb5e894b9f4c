use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::training::TrainedModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRow {
    /// Deepest leaves removed.
    pub pruned: usize,
    pub retained: usize,
    /// Leaf removed at this step; `None` for the unpruned row.
    pub pruned_feature: Option<String>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionReport {
    pub rows: Vec<AttributionRow>,
    /// Features from the top of the chain (most important) downwards.
    pub ranking: Vec<String>,
}

impl AttributionReport {
    /// Largest `k` whose accuracy stays within `max_drop` of the full model.
    pub fn deepest_prune_within(&self, max_drop: f64) -> Option<&AttributionRow> {
        let full = self.rows.first()?.accuracy;
        self.rows.iter().filter(|r| full - r.accuracy < max_drop).max_by_key(|r| r.pruned)
    }

    pub fn markdown(&self) -> String {
        let mut out = String::from("| pruned | retained | pruned_feature | accuracy |\n|---|---|---|---|\n");
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {:.2}% |\n",
                r.pruned,
                r.retained,
                r.pruned_feature.as_deref().unwrap_or("-"),
                100.0 * r.accuracy
            ));
        }
        out
    }
}

/// Accuracy after removing the `k` deepest leaves, `k = 0 ..= n − 2`.
pub fn attribution<T: Scalar>(model: &TrainedModel<T>, data: &Dataset<T>, threshold: f64) -> Result<AttributionReport> {
    let full = model.pruned(0)?;
    let features = full.tree().features().to_vec();
    let n = features.len();
    let mut rows = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let pruned = model.pruned(k)?;
        rows.push(AttributionRow {
            pruned: k,
            retained: n - k,
            pruned_feature: k.checked_sub(1).map(|i| features[i].clone()),
            accuracy: pruned.accuracy(data, T::of(threshold))?,
        });
    }
    Ok(AttributionReport { rows, ranking: features.into_iter().rev().collect() })
}
