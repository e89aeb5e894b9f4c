use ndarray::Array2;
use rand::Rng;

use crate::scalar::Scalar;

/// `n × n` matrix of independent draws `scale · (−ln(−ln U))`, `U ~ U(0, 1)`.
///
/// The same number of uniforms is consumed for every `scale`, so the draw for
/// scale `s` equals `s` times the unit-scale draw under the same seed.
pub fn sample_gumbel<T: Scalar, R: Rng + ?Sized>(n: usize, scale: T, rng: &mut R) -> Array2<T> {
    Array2::from_shape_simple_fn((n, n), || {
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        scale * T::of(-(-u.ln()).ln())
    })
}
