//! Reports over trained models: metrics, threshold sweeps, pruning-based
//! attribution, Boolean equivalence and repeated-run statistics.

mod attribution;
mod boolcheck;
mod metrics;
mod repeated;
mod thresholds;

pub use attribution::{attribution, AttributionReport, AttributionRow};
pub use boolcheck::{bool_equivalence, BoolEquivalence, Mismatch};
pub use metrics::{metrics, Metrics};
pub use repeated::{repeat_runs, repeated_eval, RepeatedReport, RunOutcome};
pub use thresholds::{sweep_scores, threshold_grid, threshold_sweep, ThresholdPicks, ThresholdReport, ThresholdRow};
