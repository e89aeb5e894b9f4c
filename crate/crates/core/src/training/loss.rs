use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;

use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::logic::{gcd2_guarded, gcd2_guarded_with_grad};
use crate::permutation::{sample_gumbel, sinkhorn_backward, sinkhorn_forward, SINKHORN_ITERS};
use crate::scalar::{pairwise_sum, Scalar};

/// Loss hyperparameters: amplifier `a`, penalty strength `λ` and node count `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig<T> {
    pub amplifier: T,
    pub penalty: T,
    pub nodes: usize,
}

impl<T: Scalar> LossConfig<T> {
    pub fn new(amplifier: T, penalty: T, nodes: usize) -> Result<Self> {
        if !(amplifier > T::zero() && amplifier.is_finite()) {
            return Err(Error::Config(format!("loss amplifier must be positive, got {amplifier}")));
        }
        if !(penalty >= T::zero() && penalty.is_finite()) {
            return Err(Error::Config(format!("weight penalty must be non-negative, got {penalty}")));
        }
        if nodes == 0 {
            return Err(Error::Config("node count must be at least 1".into()));
        }
        Ok(Self { amplifier, penalty, nodes })
    }
}

/// Gradient of the loss with respect to every raw parameter. `logits` is
/// `None` once the permutation layer is frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub logits: Option<Array2<T>>,
    pub theta_w: Vec<T>,
    pub theta_a: Vec<T>,
}

impl<T: Scalar> Gradients<T> {
    /// Largest absolute component; NaN if any component is not finite.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        let all = self.theta_w.iter().chain(&self.theta_a).chain(self.logits.iter().flat_map(|l| l.iter()));
        for &g in all {
            if !g.is_finite() {
                return T::nan();
            }
            m = m.max(g.abs());
        }
        m
    }
}

/// Fold of the guarded aggregator along the chain.
fn chain<T: Scalar>(z: ArrayView1<'_, T>, w: &[T], a: &[T]) -> T {
    let mut r = z[0];
    for i in 1..z.len() {
        r = gcd2_guarded(r, z[i], w[i - 1], a[i - 1]);
    }
    r
}

/// Features in chain order: `X · Pᵀ` in soft mode, column gather in hard mode.
fn arrange<T: Scalar>(params: &ModelParams<T>, x: ArrayView2<'_, T>, p: Option<&Array2<T>>) -> Array2<T> {
    match (params.perm.hard_assignment(), p) {
        (Some(perm), _) => x.select(ndarray::Axis(1), perm.as_slice()),
        (None, Some(p)) => x.dot(&p.t()),
        (None, None) => unreachable!("soft mode always carries an assignment"),
    }
}

fn check_batch<T: Scalar>(params: &ModelParams<T>, x: ArrayView2<'_, T>, y: &[T]) -> Result<()> {
    if x.ncols() != params.n_features() {
        return Err(Error::Shape { expected: params.n_features(), got: x.ncols() });
    }
    if x.nrows() != y.len() {
        return Err(Error::Shape { expected: x.nrows(), got: y.len() });
    }
    if x.nrows() == 0 {
        return Err(Error::Dataset("empty batch".into()));
    }
    Ok(())
}

fn soft_matrix<T: Scalar>(params: &ModelParams<T>, noise: Option<&Array2<T>>) -> Result<Option<Array2<T>>> {
    if params.perm.is_frozen() {
        return Ok(None);
    }
    let m = match noise {
        Some(g) => &params.perm.logits + g,
        None => params.perm.logits.clone(),
    };
    Ok(Some(sinkhorn_forward(&m, params.perm.temperature, SINKHORN_ITERS)?.0))
}

/// Model outputs for every row. Soft mode mixes features through
/// `sinkhorn(logits + noise)`; `noise = None` means no noise.
pub fn predict_with_noise<T: Scalar>(
    params: &ModelParams<T>,
    x: ArrayView2<'_, T>,
    noise: Option<&Array2<T>>,
) -> Result<Vec<T>> {
    if x.ncols() != params.n_features() {
        return Err(Error::Shape { expected: params.n_features(), got: x.ncols() });
    }
    let p = soft_matrix(params, noise)?;
    let z = arrange(params, x, p.as_ref());
    let (w, a) = (params.weights(), params.andness());
    Ok(z.rows().into_iter().map(|row| chain(row, &w, &a)).collect())
}

/// Single-sample forward pass; soft mode draws fresh Gumbel noise at the
/// layer's current scale.
pub fn forward<T: Scalar, R: Rng + ?Sized>(params: &ModelParams<T>, sample: &[T], rng: &mut R) -> Result<T> {
    let x = ArrayView2::from_shape((1, sample.len()), sample)
        .map_err(|_| Error::Shape { expected: params.n_features(), got: sample.len() })?;
    let noise = (!params.perm.is_frozen()).then(|| sample_gumbel(params.n_features(), params.perm.gumbel_scale, rng));
    Ok(predict_with_noise(params, x, noise.as_ref())?[0])
}

fn penalty<T: Scalar>(params: &ModelParams<T>, cfg: &LossConfig<T>) -> T {
    let half = T::of(0.5);
    let sq: Vec<T> = params.theta_w.iter().map(|t| (t.sigmoid() - half).powi(2)).collect();
    cfg.penalty * pairwise_sum(&sq) / T::of(cfg.nodes as f64)
}

fn mse<T: Scalar>(pred: &[T], y: &[T]) -> T {
    let sq: Vec<T> = pred.iter().zip(y).map(|(&p, &t)| (p - t).powi(2)).collect();
    pairwise_sum(&sq) / T::of(y.len() as f64)
}

/// `a · (MSE + λ/N · Σ (σ(θ_w) − 0.5)²)` with the noise held fixed.
pub fn loss_with_noise<T: Scalar>(
    params: &ModelParams<T>,
    x: ArrayView2<'_, T>,
    y: &[T],
    cfg: &LossConfig<T>,
    noise: Option<&Array2<T>>,
) -> Result<T> {
    check_batch(params, x, y)?;
    let pred = predict_with_noise(params, x, noise)?;
    Ok(cfg.amplifier * (mse(&pred, y) + penalty(params, cfg)))
}

/// Loss with freshly drawn noise in soft mode.
pub fn loss<T: Scalar, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    x: ArrayView2<'_, T>,
    y: &[T],
    cfg: &LossConfig<T>,
    rng: &mut R,
) -> Result<T> {
    let noise = (!params.perm.is_frozen()).then(|| sample_gumbel(params.n_features(), params.perm.gumbel_scale, rng));
    loss_with_noise(params, x, y, cfg, noise.as_ref())
}

/// Loss and reverse-mode gradients with the noise held fixed.
pub fn gradients_with_noise<T: Scalar>(
    params: &ModelParams<T>,
    x: ArrayView2<'_, T>,
    y: &[T],
    cfg: &LossConfig<T>,
    noise: Option<&Array2<T>>,
) -> Result<(T, Gradients<T>)> {
    check_batch(params, x, y)?;
    let n = params.n_features();
    let m = n - 1;
    let s = x.nrows();

    let soft = if params.perm.is_frozen() {
        None
    } else {
        let logits = match noise {
            Some(g) => &params.perm.logits + g,
            None => params.perm.logits.clone(),
        };
        Some(sinkhorn_forward(&logits, params.perm.temperature, SINKHORN_ITERS)?)
    };
    let z = arrange(params, x, soft.as_ref().map(|(p, _)| p));
    let (w, a) = (params.weights(), params.andness());

    let scale = cfg.amplifier * T::of(2.0) / T::of(s as f64);
    let mut dz = Array2::<T>::zeros((s, n));
    let mut dw = vec![T::zero(); m];
    let mut da = vec![T::zero(); m];
    let mut sq = Vec::with_capacity(s);
    let mut running = vec![T::zero(); n];
    let mut partials = Vec::with_capacity(m);

    for (k, row) in z.rows().into_iter().enumerate() {
        partials.clear();
        running[0] = row[0];
        for i in 1..n {
            let g = gcd2_guarded_with_grad(running[i - 1], row[i], w[i - 1], a[i - 1]);
            running[i] = g.value;
            partials.push(g);
        }
        let err = running[n - 1] - y[k];
        sq.push(err * err);
        let mut dr = scale * err;
        let mut dz_row = dz.row_mut(k);
        for i in (1..n).rev() {
            let g = &partials[i - 1];
            dz_row[i] = dr * g.dy;
            dw[i - 1] = dw[i - 1] + dr * g.dw;
            da[i - 1] = da[i - 1] + dr * g.dalpha;
            dr = dr * g.dx;
        }
        dz_row[0] = dr;
    }

    let loss = cfg.amplifier * (pairwise_sum(&sq) / T::of(s as f64) + penalty(params, cfg));

    let half = T::of(0.5);
    let pen = cfg.amplifier * cfg.penalty * T::of(2.0) / T::of(cfg.nodes as f64);
    let theta_w = params
        .theta_w
        .iter()
        .zip(&dw)
        .map(|(&t, &g)| {
            let sg = t.sigmoid();
            let ds = sg * (T::one() - sg);
            (g + pen * (sg - half)) * ds
        })
        .collect();
    let theta_a = params
        .theta_a
        .iter()
        .zip(&da)
        .map(|(&t, &g)| {
            let sg = t.sigmoid();
            g * T::of(3.0) * sg * (T::one() - sg)
        })
        .collect();

    // z = x · Pᵀ  ⇒  ∂L/∂P = dzᵀ · x
    let logits = soft.map(|(_, tape)| sinkhorn_backward(&tape, &dz.t().dot(&x)));

    let grads = Gradients { logits, theta_w, theta_a };
    if !grads.max_abs().is_finite() || !loss.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    Ok((loss, grads))
}

/// Gradients with freshly drawn noise in soft mode.
pub fn gradients<T: Scalar, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    x: ArrayView2<'_, T>,
    y: &[T],
    cfg: &LossConfig<T>,
    rng: &mut R,
) -> Result<(T, Gradients<T>)> {
    let noise = (!params.perm.is_frozen()).then(|| sample_gumbel(params.n_features(), params.perm.gumbel_scale, rng));
    gradients_with_noise(params, x, y, cfg, noise.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::{Permutation, PermutationConfig, PermutationState};
    use crate::training::params::{theta_for_andness, theta_for_weight};
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixed(order: Vec<usize>, w: &[f64], a: &[f64]) -> ModelParams<f64> {
        let perm = PermutationState::fixed(Permutation::new(order).unwrap(), &PermutationConfig::default());
        ModelParams::new(
            perm,
            w.iter().map(|&v| theta_for_weight(v)).collect(),
            a.iter().map(|&v| theta_for_andness(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn mean_node_forward() {
        let p = fixed(vec![0, 1], &[0.5], &[0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((forward(&p, &[0.2, 0.6], &mut rng).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn product_anchor_commutes_under_reversal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for order in [vec![0, 1], vec![1, 0]] {
            let p = fixed(order, &[0.5], &[1.25]);
            assert!((forward(&p, &[0.9, 0.1], &mut rng).unwrap() - 0.09).abs() < 1e-12);
        }
    }

    #[test]
    fn soft_with_dominant_identity_matches_hard() {
        let cfg = PermutationConfig::default();
        let n = 4;
        let mut logits = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            logits[[i, i]] = 20.0;
        }
        let mut soft = fixed((0..n).collect(), &[0.4, 0.6, 0.3], &[0.9, 0.2, 1.3]);
        let hard = soft.clone();
        soft.perm = PermutationState::from_parts(logits, 1.0, 0.0, (cfg.min_noise, cfg.max_noise), None).unwrap();
        let x = array![[0.1, 0.5, 0.9, 0.3], [0.7, 0.2, 0.4, 0.8]];
        let a = predict_with_noise(&soft, x.view(), None).unwrap();
        let b = predict_with_noise(&hard, x.view(), None).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-3);
        }
    }

    #[test]
    fn loss_examples() {
        let cfg = LossConfig::new(1.0, 0.0, 1).unwrap();
        let p = fixed(vec![0, 1], &[0.5], &[0.5]);
        let x = array![[0.5, 0.5], [0.5, 0.5]];
        assert_eq!(loss_with_noise(&p, x.view(), &[0.0, 1.0], &cfg, None).unwrap(), 0.25);
        let x = array![[0.2, 0.6], [1.0, 1.0]];
        let perfect = loss_with_noise(&p, x.view(), &[0.4, 1.0], &LossConfig::new(1.0, 0.3, 1).unwrap(), None).unwrap();
        assert!(perfect.abs() < 1e-20);
        let l1 = loss_with_noise(&p, x.view(), &[0.0, 0.0], &cfg, None).unwrap();
        let l2 = loss_with_noise(&p, x.view(), &[0.0, 0.0], &LossConfig::new(2.0, 0.0, 1).unwrap(), None).unwrap();
        assert_eq!(l2, 2.0 * l1);
    }

    #[test]
    fn penalty_gradient_vanishes_at_neutral_weight() {
        let p = fixed(vec![0, 1, 2], &[0.5, 0.5], &[1.0, 1.0]);
        let x = array![[0.3, 0.3, 0.3]];
        // output with equal inputs under weight 0.5 does not depend on w
        let (_, with) = gradients_with_noise(&p, x.view(), &[0.1], &LossConfig::new(1.0, 5.0, 2).unwrap(), None).unwrap();
        let (_, without) = gradients_with_noise(&p, x.view(), &[0.1], &LossConfig::new(1.0, 0.0, 2).unwrap(), None).unwrap();
        assert_eq!(with.theta_w, without.theta_w);
    }

    #[test]
    fn config_validation() {
        assert!(LossConfig::new(0.0, 0.0, 1).is_err());
        assert!(LossConfig::new(1.0, -1.0, 1).is_err());
        assert!(LossConfig::new(1.0, 0.0, 0).is_err());
    }

    #[test]
    fn batch_shape_errors() {
        let p = fixed(vec![0, 1], &[0.5], &[0.5]);
        let cfg = LossConfig::new(1.0, 0.0, 1).unwrap();
        assert!(loss_with_noise(&p, array![[0.1, 0.2, 0.3]].view(), &[0.0], &cfg, None).is_err());
        assert!(loss_with_noise(&p, array![[0.1, 0.2]].view(), &[0.0, 1.0], &cfg, None).is_err());
    }

    #[test]
    fn frozen_gradients_are_repeatable_and_skip_logits() {
        let p = fixed(vec![2, 0, 1], &[0.3, 0.7], &[1.1, -0.2]);
        let x = array![[0.1, 0.8, 0.4], [0.6, 0.3, 0.9]];
        let cfg = LossConfig::new(1.0, 0.01, 2).unwrap();
        let a = gradients_with_noise(&p, x.view(), &[1.0, 0.0], &cfg, None).unwrap();
        let b = gradients_with_noise(&p, x.view(), &[1.0, 0.0], &cfg, None).unwrap();
        assert_eq!(a, b);
        assert!(a.1.logits.is_none());
    }
}
