use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

use super::{hungarian, sample_gumbel, sinkhorn, Permutation, SINKHORN_ITERS};

/// Exploration schedule of the permutation layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PermutationConfig {
    /// Initial Sinkhorn temperature `τ₀`.
    pub initial_temperature: f64,
    /// Multiplicative temperature decay applied every `decay_every` epochs.
    pub temperature_decay: f64,
    pub decay_every: usize,
    /// Gumbel noise scale bounds `ε_min`, `ε_max`.
    pub min_noise: f64,
    pub max_noise: f64,
    /// Noise growth `γ_inc` while the loss stalls, decay `γ_dec` while it improves.
    pub noise_increase: f64,
    pub noise_decrease: f64,
    /// Epochs per sliding loss window.
    pub history_window: usize,
    /// Half-width of the uniform logit initialization.
    pub init_spread: f64,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            temperature_decay: 0.95,
            decay_every: 1000,
            min_noise: 0.1,
            max_noise: 2.0,
            noise_increase: 1.05,
            noise_decrease: 0.98,
            history_window: 100,
            init_spread: 0.1,
        }
    }
}

impl PermutationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.initial_temperature > 0.0) {
            return bad("initial_temperature must be positive");
        }
        if !(self.temperature_decay > 0.0 && self.temperature_decay <= 1.0) {
            return bad("temperature_decay must lie in (0, 1]");
        }
        if self.decay_every == 0 {
            return bad("decay_every must be at least 1");
        }
        if !(self.min_noise >= 0.0 && self.min_noise <= self.max_noise) {
            return bad("noise bounds must satisfy 0 <= min_noise <= max_noise");
        }
        if !(self.noise_increase >= 1.0 && self.noise_decrease > 0.0 && self.noise_decrease <= 1.0) {
            return bad("noise_increase must be >= 1 and noise_decrease in (0, 1]");
        }
        if self.history_window == 0 {
            return bad("history_window must be at least 1");
        }
        if !(self.init_spread >= 0.0) {
            return bad("init_spread must be non-negative");
        }
        Ok(())
    }
}

/// Trainable permutation layer. Soft until frozen; afterwards it applies the
/// hard assignment exactly and consumes no randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationState<T> {
    pub logits: Array2<T>,
    pub temperature: T,
    pub gumbel_scale: T,
    pub min_noise: T,
    pub max_noise: T,
    hard: Option<Permutation>,
}

impl<T: Scalar> PermutationState<T> {
    /// Logits drawn i.i.d. uniform in `[−spread, spread]`; noise starts at
    /// its maximum.
    pub fn new<R: Rng + ?Sized>(n: usize, cfg: &PermutationConfig, rng: &mut R) -> Self {
        let spread = cfg.init_spread;
        let logits = Array2::from_shape_simple_fn((n, n), || {
            T::of(if spread > 0.0 { rng.random_range(-spread..=spread) } else { 0.0 })
        });
        Self {
            logits,
            temperature: T::of(cfg.initial_temperature),
            gumbel_scale: T::of(cfg.max_noise),
            min_noise: T::of(cfg.min_noise),
            max_noise: T::of(cfg.max_noise),
            hard: None,
        }
    }

    /// Already-frozen layer, used when the feature order is fixed up front.
    pub fn fixed(order: Permutation, cfg: &PermutationConfig) -> Self {
        let n = order.len();
        Self {
            logits: Array2::zeros((n, n)),
            temperature: T::of(cfg.initial_temperature),
            gumbel_scale: T::of(cfg.min_noise),
            min_noise: T::of(cfg.min_noise),
            max_noise: T::of(cfg.max_noise),
            hard: Some(order),
        }
    }

    /// Reassembles a state from stored parts.
    pub fn from_parts(
        logits: Array2<T>,
        temperature: T,
        gumbel_scale: T,
        (min_noise, max_noise): (T, T),
        hard: Option<Permutation>,
    ) -> Result<Self> {
        if logits.nrows() != logits.ncols() {
            return Err(Error::Shape { expected: logits.nrows(), got: logits.ncols() });
        }
        if !(temperature > T::zero()) {
            return Err(domain("temperature must be positive"));
        }
        if let Some(p) = &hard {
            if p.len() != logits.nrows() {
                return Err(Error::Shape { expected: logits.nrows(), got: p.len() });
            }
        }
        Ok(Self { logits, temperature, gumbel_scale, min_noise, max_noise, hard })
    }

    pub fn len(&self) -> usize {
        self.logits.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.logits.is_empty()
    }

    pub fn is_frozen(&self) -> bool {
        self.hard.is_some()
    }

    pub fn hard_assignment(&self) -> Option<&Permutation> {
        self.hard.as_ref()
    }

    /// `sinkhorn(logits + gumbel, τ, 20)`.
    pub fn soft_assignment<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Array2<T>> {
        if self.is_frozen() {
            return Err(Error::State("permutation layer is frozen; soft assignment unavailable".into()));
        }
        let noise = sample_gumbel(self.len(), self.gumbel_scale, rng);
        sinkhorn(&(&self.logits + &noise), self.temperature, SINKHORN_ITERS)
    }

    /// Noise-free hardening candidate: Hungarian assignment of the current
    /// Sinkhorn matrix.
    pub fn hardening_candidate(&self) -> Result<Permutation> {
        hungarian(&sinkhorn(&self.logits, self.temperature, SINKHORN_ITERS)?)
    }

    pub fn freeze(mut self, candidate: Permutation) -> Result<Self> {
        self.freeze_in_place(candidate)?;
        Ok(self)
    }

    pub(crate) fn freeze_in_place(&mut self, candidate: Permutation) -> Result<()> {
        if self.is_frozen() {
            return Err(Error::State("permutation layer is already frozen".into()));
        }
        if candidate.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), got: candidate.len() });
        }
        self.hard = Some(candidate);
        Ok(())
    }

    pub(crate) fn noise_up(&mut self, factor: T) {
        self.gumbel_scale = (self.gumbel_scale * factor).min(self.max_noise);
    }

    pub(crate) fn noise_down(&mut self, factor: T) {
        self.gumbel_scale = (self.gumbel_scale * factor).max(self.min_noise);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Axis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(n: usize, seed: u64) -> PermutationState<f64> {
        PermutationState::new(n, &PermutationConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn init_is_small_uniform() {
        let s = state(6, 1);
        assert!(s.logits.iter().all(|v| v.abs() <= 0.1));
        assert!(!s.is_frozen());
        assert_eq!(s.gumbel_scale, 2.0);
    }

    #[test]
    fn zero_noise_dominant_diagonal_is_near_identity() {
        let mut s = state(4, 2);
        s.logits = Array2::from_shape_fn((4, 4), |(i, j)| if i == j { 12.0 } else { 0.0 });
        s.gumbel_scale = 0.0;
        let p = s.soft_assignment(&mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for i in 0..4 {
            assert!(p[[i, i]] > 0.999);
        }
        assert_eq!(s.hardening_candidate().unwrap(), Permutation::identity(4));
    }

    #[test]
    fn soft_assignment_is_seeded_and_doubly_stochastic() {
        let mut s = state(7, 3);
        s.gumbel_scale = 0.5;
        let a = s.soft_assignment(&mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = s.soft_assignment(&mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        for v in a.sum_axis(Axis(0)).iter().chain(a.sum_axis(Axis(1)).iter()) {
            assert!((v - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn freeze_lifecycle() {
        let s = state(3, 5).freeze(Permutation::identity(3)).unwrap();
        assert!(s.is_frozen());
        assert!(matches!(s.soft_assignment(&mut ChaCha8Rng::seed_from_u64(0)), Err(Error::State(_))));
        assert!(matches!(s.clone().freeze(Permutation::identity(3)), Err(Error::State(_))));
        assert_eq!(s.hard_assignment().unwrap().apply(&[1, 2, 3]).unwrap(), vec![1, 2, 3]);
        assert!(state(3, 5).freeze(Permutation::identity(4)).is_err());
    }

    #[test]
    fn noise_stays_within_bounds() {
        let mut s = state(2, 6);
        for _ in 0..200 {
            s.noise_up(1.05);
        }
        assert_eq!(s.gumbel_scale, 2.0);
        for _ in 0..500 {
            s.noise_down(0.98);
        }
        assert_eq!(s.gumbel_scale, 0.1);
    }

    #[test]
    fn config_validation() {
        assert!(PermutationConfig::default().validate().is_ok());
        let bad = PermutationConfig { min_noise: 3.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = PermutationConfig { initial_temperature: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
