//! Shared finite-difference oracle.

use bacon::permutation::{sample_gumbel, PermutationConfig, PermutationState};
use bacon::training::{gradients_with_noise, loss_with_noise, LossConfig, ModelParams};
use ndarray::Array2;
use rand::Rng;

const H: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-4;
const FLOOR: f64 = 1e-6;

/// Andness raw values away from the branch seams at α ∈ {0.25, 0.5, 0.75}.
fn theta_a(rng: &mut impl Rng) -> f64 {
    loop {
        let t: f64 = rng.random_range(-2.5..2.5);
        let alpha = 3.0 / (1.0 + (-t).exp()) - 1.0;
        if [0.25, 0.5, 0.75].iter().all(|s| (alpha - s).abs() > 1e-3) {
            return t;
        }
    }
}

pub fn random_case(n: usize, frozen: bool, rng: &mut impl Rng) -> (ModelParams<f64>, Array2<f64>, Vec<f64>, Option<Array2<f64>>) {
    let cfg = PermutationConfig::default();
    let logits = Array2::from_shape_simple_fn((n, n), || rng.random_range(-1.0..1.0));
    let tau = rng.random_range(0.5..1.5);
    let perm = if frozen {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        PermutationState::from_parts(logits, tau, 0.0, (0.1, 2.0), Some(bacon::Permutation::new(order).unwrap())).unwrap()
    } else {
        PermutationState::from_parts(logits, tau, 0.5, (cfg.min_noise, cfg.max_noise), None).unwrap()
    };
    let tw = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
    let ta = (0..n - 1).map(|_| theta_a(rng)).collect();
    let params = ModelParams::new(perm, tw, ta).unwrap();
    let rows = rng.random_range(3..12);
    let x = Array2::from_shape_simple_fn((rows, n), || rng.random_range(0.05..0.95));
    let y = (0..rows).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
    let noise = (!frozen).then(|| sample_gumbel(n, 0.5, rng));
    (params, x, y, noise)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(FLOOR)
}

/// Worst relative error over every raw parameter.
pub fn check(params: &ModelParams<f64>, x: &Array2<f64>, y: &[f64], cfg: &LossConfig<f64>, noise: Option<&Array2<f64>>) -> f64 {
    let (_, g) = gradients_with_noise(params, x.view(), y, cfg, noise).unwrap();
    let f = |p: &ModelParams<f64>| loss_with_noise(p, x.view(), y, cfg, noise).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..params.theta_w.len() {
        for (which, analytic) in [(0, g.theta_w[i]), (1, g.theta_a[i])] {
            let mut up = params.clone();
            let mut dn = params.clone();
            let (u, d) = if which == 0 { (&mut up.theta_w, &mut dn.theta_w) } else { (&mut up.theta_a, &mut dn.theta_a) };
            u[i] += H;
            d[i] -= H;
            worst = worst.max(rel_err(analytic, (f(&up) - f(&dn)) / (2.0 * H)));
        }
    }
    if let Some(dl) = &g.logits {
        for ((r, c), &analytic) in dl.indexed_iter() {
            let mut up = params.clone();
            let mut dn = params.clone();
            up.perm.logits[[r, c]] += H;
            dn.perm.logits[[r, c]] -= H;
            worst = worst.max(rel_err(analytic, (f(&up) - f(&dn)) / (2.0 * H)));
        }
    } else {
        assert!(params.perm.is_frozen());
    }
    worst
}
