use ndarray::{Array2, Axis, Zip};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Alternating normalization rounds used everywhere in training.
pub const SINKHORN_ITERS: usize = 20;

/// Doubly stochastic relaxation of `exp(m / τ)`: `iters` rounds of row then
/// column normalization, carried out on log values.
pub fn sinkhorn<T: Scalar>(m: &Array2<T>, tau: T, iters: usize) -> Result<Array2<T>> {
    Ok(sinkhorn_forward(m, tau, iters)?.0)
}

/// Normalized log matrices after every half step, kept for the backward pass.
pub(crate) struct SinkhornTape<T> {
    tau: T,
    /// `exp` of each half-step output; odd entries are row steps.
    softmax: Vec<Array2<T>>,
}

pub(crate) fn sinkhorn_forward<T: Scalar>(
    m: &Array2<T>,
    tau: T,
    iters: usize,
) -> Result<(Array2<T>, SinkhornTape<T>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape { expected: m.nrows(), got: m.ncols() });
    }
    if !(tau > T::zero()) {
        return Err(domain(format!("sinkhorn temperature must be positive, got {tau}")));
    }
    if iters == 0 {
        return Err(domain("sinkhorn needs at least one iteration"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sinkhorn input"));
    }
    let mut log = m.mapv(|v| v / tau);
    let mut softmax = Vec::with_capacity(2 * iters);
    for _ in 0..iters {
        normalize_lanes(&mut log, Axis(1));
        softmax.push(log.mapv(T::exp));
        normalize_lanes(&mut log, Axis(0));
        softmax.push(log.mapv(T::exp));
    }
    let p = softmax.last().expect("iters >= 1").clone();
    Ok((p, SinkhornTape { tau, softmax }))
}

/// Subtracts log-sum-exp along `axis` lanes: `Axis(1)` normalizes rows.
fn normalize_lanes<T: Scalar>(log: &mut Array2<T>, axis: Axis) {
    for mut lane in log.lanes_mut(axis) {
        let max = lane.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        let lse = max + lane.iter().map(|&v| (v - max).exp()).sum::<T>().ln();
        lane.mapv_inplace(|v| v - lse);
    }
}

/// Pulls `∂L/∂P` back to `∂L/∂m`.
pub(crate) fn sinkhorn_backward<T: Scalar>(tape: &SinkhornTape<T>, d_p: &Array2<T>) -> Array2<T> {
    let mut grad = d_p * tape.softmax.last().expect("non-empty tape");
    for (step, s) in tape.softmax.iter().enumerate().rev() {
        // Even indices were row steps, odd indices column steps.
        let axis = if step % 2 == 0 { Axis(1) } else { Axis(0) };
        let sums = grad.sum_axis(axis);
        let sums = if step % 2 == 0 { sums.insert_axis(Axis(1)) } else { sums.insert_axis(Axis(0)) };
        Zip::from(&mut grad).and(s).and_broadcast(&sums).for_each(|g, &sv, &total| {
            *g = *g - sv * total;
        });
    }
    grad.mapv(|v| v / tape.tau)
}

/// `P · x`: the soft reordering of a feature vector.
pub fn mix<T: Scalar>(p: &Array2<T>, x: &[T]) -> Vec<T> {
    p.rows().into_iter().map(|row| row.iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
}
