use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary classification metrics at one threshold. A score at or above the
/// threshold is a positive prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub threshold: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
    /// No positive predictions; `precision` reported as 1.
    pub precision_undefined: bool,
    /// No actual positives; `recall` reported as 1.
    pub recall_undefined: bool,
}

impl Metrics {
    pub fn predicted_positives(&self) -> usize {
        self.true_positives + self.false_positives
    }
}

pub fn metrics<T: Scalar>(scores: &[T], labels: &[bool], threshold: f64) -> Result<Metrics> {
    if scores.len() != labels.len() {
        return Err(Error::Shape { expected: labels.len(), got: scores.len() });
    }
    if scores.is_empty() {
        return Err(Error::Dataset("metrics of an empty sample".into()));
    }
    let t = T::of(threshold);
    let (mut tp, mut fp, mut tn, mut fneg) = (0, 0, 0, 0);
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= t, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fneg += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    Ok(Metrics {
        threshold,
        accuracy: (tp + tn) as f64 / scores.len() as f64,
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fneg),
        true_positives: tp,
        false_positives: fp,
        true_negatives: tn,
        false_negatives: fneg,
        precision_undefined: tp + fp == 0,
        recall_undefined: tp + fneg == 0,
    })
}
