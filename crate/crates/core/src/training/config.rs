use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::PermutationConfig;
use crate::tree::TreeLayout;

/// Gradient norm bounds below/above which an attempt is abandoned; both are
/// multiplied by the loss amplifier.
pub const VANISHING_GRADIENT: f64 = 1e-10;
pub const EXPLODING_GRADIENT: f64 = 1e4;
/// Minimum relative decrease of the windowed best loss that counts as progress.
pub const IMPROVEMENT_RATIO: f64 = 1e-3;
/// Adam epsilon at unit amplifier.
pub const ADAM_EPS: f64 = 1e-8;

/// Training hyperparameters. Loss thresholds are in amplified units: scale
/// them together with `loss_amplifier`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    /// Training accuracy an attempt must reach to be returned.
    pub acceptance_threshold: f64,
    pub attempts: usize,
    /// Soft loss below which a hard permutation is proposed.
    pub freeze_loss_threshold: f64,
    /// Hard loss the proposal must beat; defaults to `freeze_loss_threshold`.
    pub freeze_accept_threshold: Option<f64>,
    /// Keep the input feature order and train only the aggregation nodes.
    pub is_frozen: bool,
    /// Largest allowed `hard − soft` loss increase when freezing.
    pub lock_loss_tolerance: f64,
    pub loss_amplifier: f64,
    pub max_epochs: usize,
    /// Stop an attempt this many epochs after freezing. `None` runs to
    /// `max_epochs`.
    pub post_freeze_epochs: Option<usize>,
    pub save_model: bool,
    pub save_path: PathBuf,
    pub tree_layout: TreeLayout,
    pub weight_penalty_strength: f64,
    pub learning_rate: f64,
    pub seed: u64,
    /// Score at or above which a prediction counts as positive.
    pub threshold: f64,
    /// Half-width of the uniform initialization of node parameters.
    pub param_init_spread: f64,
    pub permutation: PermutationConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            acceptance_threshold: 0.9,
            attempts: 100,
            freeze_loss_threshold: 0.01,
            freeze_accept_threshold: None,
            is_frozen: false,
            lock_loss_tolerance: 0.05,
            loss_amplifier: 1.0,
            max_epochs: 12_000,
            post_freeze_epochs: None,
            save_model: false,
            save_path: PathBuf::from("./assembler.json"),
            tree_layout: TreeLayout::Left,
            weight_penalty_strength: 1e-4,
            learning_rate: 0.01,
            seed: 0,
            threshold: 0.5,
            param_init_spread: 0.1,
            permutation: PermutationConfig::default(),
        }
    }
}

impl TrainingConfig {
    pub fn accept_threshold(&self) -> f64 {
        self.freeze_accept_threshold.unwrap_or(self.freeze_loss_threshold)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(0.0..=1.0).contains(&self.acceptance_threshold) {
            return bad(format!("acceptance_threshold {} outside [0, 1]", self.acceptance_threshold));
        }
        if self.attempts == 0 {
            return bad("attempts must be at least 1".into());
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if !(self.freeze_loss_threshold >= 0.0) || !(self.accept_threshold() >= 0.0) {
            return bad("freeze thresholds must be non-negative".into());
        }
        if !(self.lock_loss_tolerance >= 0.0) {
            return bad("lock_loss_tolerance must be non-negative".into());
        }
        if !(self.loss_amplifier > 0.0 && self.loss_amplifier.is_finite()) {
            return bad(format!("loss_amplifier must be positive, got {}", self.loss_amplifier));
        }
        if !(self.weight_penalty_strength >= 0.0) {
            return bad("weight_penalty_strength must be non-negative".into());
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad(format!("threshold {} outside [0, 1]", self.threshold));
        }
        if !(self.param_init_spread >= 0.0) {
            return bad("param_init_spread must be non-negative".into());
        }
        self.tree_layout.ensure_supported()?;
        self.permutation.validate()
    }
}
