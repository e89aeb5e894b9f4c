//! Parameterization, loss, hand-written reverse-mode gradients and the
//! two-phase training loop.

mod adam;
mod config;
mod loss;
mod model;
mod params;
mod train;

pub use config::{TrainingConfig, ADAM_EPS, EXPLODING_GRADIENT, IMPROVEMENT_RATIO, VANISHING_GRADIENT};
pub use loss::{forward, gradients, gradients_with_noise, loss, loss_with_noise, predict_with_noise, Gradients, LossConfig};
pub use model::{
    load_model, save_model, AttemptReport, DataProvenance, StopReason, TrainedModel, TrainingMetadata, MODEL_FORMAT_VERSION,
};
pub use params::{theta_for_andness, theta_for_weight, ModelParams};
pub use train::{attempt_seed, train};
