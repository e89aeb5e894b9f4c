use serde::{Deserialize, Serialize};

use crate::data::{Preparation, RawTable};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::training::{train, TrainingConfig};

/// One run of a repeated evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    pub accuracy: f64,
    /// Leaves from the top of the chain downwards.
    pub top_features: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedReport {
    pub runs: Vec<RunOutcome>,
    pub failures: Vec<String>,
    pub mean: f64,
    /// Sample standard deviation of run accuracies.
    pub std_dev: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RepeatedReport {
    pub fn from_outcomes(runs: Vec<RunOutcome>, failures: Vec<String>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::State(format!("all {} runs failed", failures.len())));
        }
        let k = runs.len() as f64;
        let mean = runs.iter().map(|r| r.accuracy).sum::<f64>() / k;
        let std_dev = if runs.len() > 1 {
            (runs.iter().map(|r| (r.accuracy - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let half = 1.96 * std_dev / k.sqrt();
        Ok(Self { runs, failures, mean, std_dev, ci_low: mean - half, ci_high: mean + half })
    }

    pub fn best(&self) -> f64 {
        self.runs.iter().map(|r| r.accuracy).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn markdown(&self, top: usize) -> String {
        let mut out = String::from("| run | seed | accuracy | top features |\n|---|---|---|---|\n");
        for r in &self.runs {
            let names: Vec<&str> = r.top_features.iter().take(top).map(String::as_str).collect();
            out.push_str(&format!("| {} | {} | {:.2}% | {} |\n", r.run, r.seed, 100.0 * r.accuracy, names.join(", ")));
        }
        out.push_str(&format!(
            "\nmean {:.2}% (95% CI [{:.2}%, {:.2}%]), {} failed run(s)\n",
            100.0 * self.mean,
            100.0 * self.ci_low,
            100.0 * self.ci_high,
            self.failures.len()
        ));
        out
    }
}

/// Runs `run(i)` for `i` in `0..runs` and aggregates. Errors from single runs
/// are counted, not propagated.
pub fn repeat_runs<F>(runs: usize, mut run: F) -> Result<RepeatedReport>
where
    F: FnMut(usize) -> Result<RunOutcome>,
{
    if runs < 2 {
        return Err(Error::Config(format!("repeated evaluation needs at least 2 runs, got {runs}")));
    }
    let mut ok = Vec::with_capacity(runs);
    let mut failures = Vec::new();
    for i in 0..runs {
        match run(i) {
            Ok(o) => ok.push(o),
            Err(e) => {
                log::warn!("run {i} failed: {e}");
                failures.push(format!("run {i}: {e}"));
            }
        }
    }
    RepeatedReport::from_outcomes(ok, failures)
}

/// Run `i` splits with seed `cfg.seed + i`, trains with the same seed and
/// scores on its held-out side.
pub fn repeated_eval<T: Scalar>(
    table: &RawTable,
    labels: &[bool],
    prep: &Preparation,
    cfg: &TrainingConfig,
    runs: usize,
) -> Result<RepeatedReport> {
    repeat_runs(runs, |i| {
        let seed = cfg.seed.wrapping_add(i as u64);
        let data = prep.prepare::<T>(table, labels, seed)?;
        let run_cfg = TrainingConfig { seed, save_model: false, ..cfg.clone() };
        let model = train(&data.train, &run_cfg)?;
        let accuracy = model.accuracy(&data.test, T::of(cfg.threshold))?;
        log::info!("run {i}: test accuracy {accuracy:.4}");
        Ok(RunOutcome {
            run: i,
            seed,
            accuracy,
            top_features: model.tree().features().iter().rev().cloned().collect(),
        })
    })
}
