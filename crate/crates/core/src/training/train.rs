use std::collections::VecDeque;

use ndarray::ArrayView2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::Adam;
use super::config::{TrainingConfig, ADAM_EPS, EXPLODING_GRADIENT, IMPROVEMENT_RATIO, VANISHING_GRADIENT};
use super::loss::{gradients_with_noise, loss_with_noise, predict_with_noise, LossConfig};
use super::model::{accuracy_of, save_model, AttemptReport, StopReason, TrainedModel, TrainingMetadata};
use super::params::ModelParams;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::permutation::{sample_gumbel, Permutation};
use crate::scalar::Scalar;

/// Seed of attempt `k`, derived so that attempts are independent streams.
pub fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sliding loss history: progress means the best loss of the latest window
/// beats the best of the window before it by a relative margin.
struct History {
    window: usize,
    losses: VecDeque<f64>,
}

impl History {
    fn new(window: usize) -> Self {
        Self { window, losses: VecDeque::with_capacity(2 * window) }
    }

    fn record(&mut self, loss: f64) -> bool {
        if self.losses.len() == 2 * self.window {
            self.losses.pop_front();
        }
        self.losses.push_back(loss);
        if self.losses.len() < 2 * self.window {
            return true;
        }
        let min = |it: std::collections::vec_deque::Iter<'_, f64>, skip: usize| {
            it.skip(skip).take(self.window).fold(f64::INFINITY, |a, &b| a.min(b))
        };
        let previous = min(self.losses.iter(), 0);
        let latest = min(self.losses.iter(), self.window);
        latest <= previous * (1.0 - IMPROVEMENT_RATIO)
    }
}

struct Attempt<T> {
    report: AttemptReport,
    best: Option<(T, ModelParams<T>)>,
}

/// Two-phase training: soft permutation search with annealed Gumbel noise,
/// then aggregation fine-tuning over the frozen hard permutation. Attempts
/// repeat until one reaches `acceptance_threshold` training accuracy.
pub fn train<T: Scalar>(data: &Dataset<T>, cfg: &TrainingConfig) -> Result<TrainedModel<T>> {
    cfg.validate()?;
    let n = data.n_features();
    if n < 2 {
        return Err(Error::Dataset(format!("training needs at least 2 features, got {n}")));
    }
    if data.is_empty() {
        return Err(Error::Dataset("training set is empty".into()));
    }
    let loss_cfg = LossConfig::new(T::of(cfg.loss_amplifier), T::of(cfg.weight_penalty_strength), n - 1)?;
    let targets = data.targets();
    let x = data.rows().view();

    let mut reports = Vec::with_capacity(cfg.attempts);
    for attempt in 0..cfg.attempts {
        let seed = attempt_seed(cfg.seed, attempt);
        let mut run = run_attempt(x, &targets, &loss_cfg, cfg, attempt, seed)?;
        if let Some((loss, params)) = run.best.take() {
            let scores = predict_with_noise(&params, x, None)?;
            let accuracy = accuracy_of(&scores, data.labels(), T::of(cfg.threshold));
            run.report.accuracy = Some(accuracy);
            log::info!("{}", run.report);
            reports.push(run.report.clone());
            if accuracy >= cfg.acceptance_threshold {
                let metadata = TrainingMetadata {
                    seed: cfg.seed,
                    attempt,
                    epochs: run.report.epochs,
                    freeze_epoch: run.report.freeze_epoch,
                    final_loss: loss.to_f64_lossy(),
                    train_accuracy: accuracy,
                    threshold: cfg.threshold,
                    pruned: 0,
                    attempts: reports,
                    data: None,
                };
                let model = TrainedModel::new(params, data.names().to_vec(), metadata)?;
                if cfg.save_model {
                    save_model(&model, &cfg.save_path)?;
                }
                return Ok(model);
            }
        } else {
            log::info!("{}", run.report);
            reports.push(run.report);
        }
    }
    Err(Error::NotConverged(reports))
}

fn run_attempt<T: Scalar>(
    x: ArrayView2<'_, T>,
    y: &[T],
    loss_cfg: &LossConfig<T>,
    cfg: &TrainingConfig,
    attempt: usize,
    seed: u64,
) -> Result<Attempt<T>> {
    let n = x.ncols();
    let pcfg = &cfg.permutation;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = if cfg.is_frozen {
        ModelParams::init_fixed(Permutation::identity(n), pcfg, cfg.param_init_spread, &mut rng)?
    } else {
        ModelParams::init(n, pcfg, cfg.param_init_spread, &mut rng)?
    };

    let a = cfg.loss_amplifier;
    let eps = ADAM_EPS * a;
    let mut opt_logits = Adam::<T>::new(n * n, cfg.learning_rate, eps);
    let mut opt_w = Adam::<T>::new(n - 1, cfg.learning_rate, eps);
    let mut opt_a = Adam::<T>::new(n - 1, cfg.learning_rate, eps);
    let mut history = History::new(pcfg.history_window);
    let (inc, dec) = (T::of(pcfg.noise_increase), T::of(pcfg.noise_decrease));
    let decay = T::of(pcfg.temperature_decay);

    let mut report = AttemptReport {
        attempt,
        seed,
        epochs: 0,
        stop: StopReason::EpochBudget,
        freeze_epoch: if cfg.is_frozen { Some(0) } else { None },
        rejected_freezes: 0,
        best_loss: f64::INFINITY,
        accuracy: None,
    };
    let mut best: Option<(T, ModelParams<T>)> = None;

    for epoch in 1..=cfg.max_epochs {
        report.epochs = epoch;
        if epoch % pcfg.decay_every == 0 {
            params.perm.temperature = params.perm.temperature * decay;
        }
        let frozen = params.perm.is_frozen();
        let noise = (!frozen).then(|| sample_gumbel(n, params.perm.gumbel_scale, &mut rng));
        let (loss, grads) = match gradients_with_noise(&params, x, y, loss_cfg, noise.as_ref()) {
            Ok(v) => v,
            Err(Error::NonFinite(_)) => {
                report.stop = StopReason::NonFinite;
                break;
            }
            Err(e) => return Err(e),
        };
        let loss_f = loss.to_f64_lossy();
        report.best_loss = report.best_loss.min(loss_f);

        if frozen && best.as_ref().is_none_or(|(b, _)| loss < *b) {
            best = Some((loss, params.clone()));
        }

        let g = grads.max_abs().to_f64_lossy();
        if g < VANISHING_GRADIENT * a {
            report.stop = StopReason::VanishingGradient;
            break;
        }
        if g > EXPLODING_GRADIENT * a {
            report.stop = StopReason::ExplodingGradient;
            break;
        }

        if history.record(loss_f) {
            params.perm.noise_down(dec);
        } else {
            params.perm.noise_up(inc);
        }

        if !frozen && loss_f < cfg.freeze_loss_threshold {
            let candidate = params.perm.hardening_candidate()?;
            let mut hard = params.clone();
            hard.perm.freeze_in_place(candidate)?;
            let hard_loss = loss_with_noise(&hard, x, y, loss_cfg, None)?;
            let hard_f = hard_loss.to_f64_lossy();
            if hard_f < cfg.accept_threshold() && hard_f - loss_f <= cfg.lock_loss_tolerance {
                log::debug!("attempt {attempt}: froze at epoch {epoch} (soft {loss_f:.6}, hard {hard_f:.6})");
                params = hard;
                report.freeze_epoch = Some(epoch);
                report.best_loss = report.best_loss.min(hard_f);
                best = Some((hard_loss, params.clone()));
                continue;
            }
            log::trace!("attempt {attempt} epoch {epoch}: rejected {:?} (soft {loss_f:.6}, hard {hard_f:.6})", hard.perm.hard_assignment());
            report.rejected_freezes += 1;
        }

        if let Some(dl) = &grads.logits {
            opt_logits.step(params.perm.logits.iter_mut(), dl.iter());
        }
        opt_w.step(params.theta_w.iter_mut(), grads.theta_w.iter());
        opt_a.step(params.theta_a.iter_mut(), grads.theta_a.iter());

        if let (Some(limit), Some(f)) = (cfg.post_freeze_epochs, report.freeze_epoch) {
            if epoch >= f + limit {
                report.stop = StopReason::PostFreezeBudget;
                break;
            }
        }
        if epoch % 1000 == 0 {
            log::debug!(
                "attempt {attempt} epoch {epoch}: loss {loss_f:.6}, tau {:.4}, noise {:.4}, frozen {}",
                params.perm.temperature,
                params.perm.gumbel_scale,
                params.perm.is_frozen()
            );
        }
    }

    // The last update is never evaluated inside the loop.
    if params.perm.is_frozen() && report.stop != StopReason::NonFinite {
        if let Ok(l) = loss_with_noise(&params, x, y, loss_cfg, None) {
            if l.is_finite() && best.as_ref().is_none_or(|(b, _)| l < *b) {
                report.best_loss = report.best_loss.min(l.to_f64_lossy());
                best = Some((l, params));
            }
        }
    }
    Ok(Attempt { report, best })
}
