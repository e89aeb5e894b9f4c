use crate::scalar::Scalar;

/// Adaptive moment estimation over one parameter group.
#[derive(Debug, Clone)]
pub(crate) struct Adam<T> {
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Scalar> Adam<T> {
    pub(crate) fn new(len: usize, lr: f64, eps: f64) -> Self {
        Self {
            lr: T::of(lr),
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            eps: T::of(eps),
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            t: 0,
        }
    }

    pub(crate) fn step<'a>(&mut self, params: impl Iterator<Item = &'a mut T>, grads: impl Iterator<Item = &'a T>)
    where
        T: 'a,
    {
        self.t += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.t);
        let c2 = one - self.beta2.powi(self.t);
        for (((p, &g), m), v) in params.zip(grads).zip(self.m.iter_mut()).zip(self.v.iter_mut()) {
            *m = self.beta1 * *m + (one - self.beta1) * g;
            *v = self.beta2 * *v + (one - self.beta2) * g * g;
            let mhat = *m / c1;
            let vhat = *v / c2;
            *p = *p - self.lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        let mut opt = Adam::<f64>::new(2, 0.01, 1e-8);
        let mut p = [1.0, -1.0];
        opt.step(p.iter_mut(), [3.0, -0.5].iter());
        assert!((p[0] - 0.99).abs() < 1e-9);
        assert!((p[1] + 0.99).abs() < 1e-9);
    }

    #[test]
    fn minimizes_quadratic() {
        let mut opt = Adam::<f64>::new(1, 0.05, 1e-8);
        let mut p = [3.0];
        for _ in 0..2000 {
            let g = [2.0 * (p[0] - 1.0)];
            opt.step(p.iter_mut(), g.iter());
        }
        assert!((p[0] - 1.0).abs() < 1e-3);
    }
}
