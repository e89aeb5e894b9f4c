use crate::error::{domain, Result};
use crate::scalar::Scalar;

use super::{Andness, NodeWeight, TruthValue};

/// Clamp margin applied to arguments of the geometric form when derivatives
/// are required; keeps `∂/∂x` finite at `x = 0`.
pub const GUARD_EPS: f64 = 1e-9;

/// `not(x) = 1 − x`.
pub fn negate<T: Scalar>(x: TruthValue<T>) -> TruthValue<T> {
    !x
}

/// Two-argument andness-directed graded conjunction/disjunction.
///
/// `w` weighs `x`, `1 − w` weighs `y`.
pub fn gcd2<T: Scalar>(
    x: TruthValue<T>,
    y: TruthValue<T>,
    w: NodeWeight<T>,
    alpha: Andness<T>,
) -> TruthValue<T> {
    TruthValue::new(gcd2_value(x.value(), y.value(), w.value(), alpha.value())).expect("clamped into [0, 1]")
}

/// Validating variant of [`gcd2`] over raw scalars.
pub fn try_gcd2<T: Scalar>(x: T, y: T, w: T, alpha: T) -> Result<T> {
    let x = TruthValue::new(x).map_err(|_| domain(format!("gcd2: x = {x} outside [0, 1]")))?;
    let y = TruthValue::new(y).map_err(|_| domain(format!("gcd2: y = {y} outside [0, 1]")))?;
    let w = NodeWeight::new(w)?;
    let alpha = Andness::new(alpha)?;
    Ok(gcd2(x, y, w, alpha).value())
}

/// Exponent `√(3/(2−α)) − 1` of the geometric family.
#[inline]
fn geometric_exponent<T: Scalar>(alpha: T) -> T {
    (T::of(3.0) / (T::of(2.0) - alpha)).sqrt() - T::one()
}

/// `(x^{2w} y^{2(1−w)})^e` with `0⁰ = 1`.
#[inline]
fn geometric<T: Scalar>(x: T, y: T, w: T, e: T) -> T {
    let two = T::of(2.0);
    (x.powf(two * w) * y.powf(two * (T::one() - w))).powf(e)
}

/// Unchecked evaluation on raw scalars. Arguments are assumed in range; the
/// result is clamped to `[0, 1]` so rounding never leaks out of the unit
/// interval into a downstream `1 − x`.
pub fn gcd2_value<T: Scalar>(x: T, y: T, w: T, alpha: T) -> T {
    let one = T::one();
    let z = if alpha < T::of(0.5) {
        one - conjunctive(one - x, one - y, w, one - alpha)
    } else {
        conjunctive(x, y, w, alpha)
    };
    z.max(T::zero()).min(one)
}

fn conjunctive<T: Scalar>(x: T, y: T, w: T, alpha: T) -> T {
    let one = T::one();
    if alpha >= T::of(2.0) {
        return if x == one && y == one { one } else { T::zero() };
    }
    let mean = w * x + (one - w) * y;
    if alpha == T::of(0.5) {
        return mean;
    }
    let g = geometric(x, y, w, geometric_exponent(alpha));
    if alpha >= T::of(0.75) {
        g
    } else {
        let four = T::of(4.0);
        (T::of(3.0) - four * alpha) * mean + (four * alpha - T::of(2.0)) * g
    }
}

/// Value of the gradient-bearing evaluation: identical to [`gcd2_value`]
/// except that arguments of the geometric form are clamped to
/// `[GUARD_EPS, 1 − GUARD_EPS]`.
pub fn gcd2_guarded<T: Scalar>(x: T, y: T, w: T, alpha: T) -> T {
    gcd2_guarded_with_grad(x, y, w, alpha).value
}

/// Value and partial derivatives of the guarded aggregator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gcd2Grad<T> {
    pub value: T,
    pub dx: T,
    pub dy: T,
    pub dw: T,
    pub dalpha: T,
}

pub fn gcd2_guarded_with_grad<T: Scalar>(x: T, y: T, w: T, alpha: T) -> Gcd2Grad<T> {
    let one = T::one();
    if alpha < T::of(0.5) {
        let inner = conjunctive_with_grad(one - x, one - y, w, one - alpha);
        // d/dx [1 − F(1−x)] = F'(1−x); d/dα [1 − F(.., 1−α)] = F_α.
        return Gcd2Grad {
            value: one - inner.value,
            dx: inner.dx,
            dy: inner.dy,
            dw: -inner.dw,
            dalpha: inner.dalpha,
        };
    }
    conjunctive_with_grad(x, y, w, alpha)
}

fn conjunctive_with_grad<T: Scalar>(x: T, y: T, w: T, alpha: T) -> Gcd2Grad<T> {
    let zero = T::zero();
    let one = T::one();
    let two = T::of(2.0);
    if alpha >= two {
        let value = if x == one && y == one { one } else { zero };
        return Gcd2Grad { value, dx: zero, dy: zero, dw: zero, dalpha: zero };
    }
    let mean = w * x + (one - w) * y;
    let half = T::of(0.5);
    if alpha == half {
        return Gcd2Grad { value: mean, dx: w, dy: one - w, dw: x - y, dalpha: zero };
    }

    let lo = T::of(GUARD_EPS);
    let hi = one - lo;
    let (xc, x_free) = clamp_flag(x, lo, hi);
    let (yc, y_free) = clamp_flag(y, lo, hi);
    let (lx, ly) = (xc.ln(), yc.ln());
    let log_base = two * w * lx + two * (one - w) * ly;
    let e = geometric_exponent(alpha);
    let g = (e * log_base).exp();
    let ge = g * e;
    let gx = if x_free { ge * two * w / xc } else { zero };
    let gy = if y_free { ge * two * (one - w) / yc } else { zero };
    let gw = ge * two * (lx - ly);
    // de/dα = (e + 1) / (2 (2 − α))
    let ga = g * log_base * (e + one) / (two * (two - alpha));

    if alpha >= T::of(0.75) {
        return Gcd2Grad { value: g, dx: gx, dy: gy, dw: gw, dalpha: ga };
    }
    let four = T::of(4.0);
    let cm = T::of(3.0) - four * alpha;
    let cg = four * alpha - two;
    Gcd2Grad {
        value: cm * mean + cg * g,
        dx: cm * w + cg * gx,
        dy: cm * (one - w) + cg * gy,
        dw: cm * (x - y) + cg * gw,
        dalpha: four * (g - mean) + cg * ga,
    }
}

#[inline]
fn clamp_flag<T: Scalar>(v: T, lo: T, hi: T) -> (T, bool) {
    if v < lo {
        (lo, false)
    } else if v > hi {
        (hi, false)
    } else {
        (v, true)
    }
}
