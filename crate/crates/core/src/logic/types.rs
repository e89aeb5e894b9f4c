use std::fmt;

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Degree of truth in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct TruthValue<T>(T);

impl<T: Scalar> TruthValue<T> {
    pub fn new(value: T) -> Result<Self> {
        if value >= T::zero() && value <= T::one() {
            Ok(Self(value))
        } else {
            Err(domain(format!("truth value {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

impl<T: Scalar> std::ops::Not for TruthValue<T> {
    type Output = Self;

    fn not(self) -> Self {
        Self(T::one() - self.0)
    }
}

impl<T: Scalar> fmt::Display for TruthValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Andness `α ∈ [-1, 2]`; orness is `1 − α`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Andness<T>(T);

impl<T: Scalar> Andness<T> {
    pub const MIN: f64 = -1.0;
    pub const MAX: f64 = 2.0;

    pub fn new(alpha: T) -> Result<Self> {
        if alpha >= T::of(Self::MIN) && alpha <= T::of(Self::MAX) {
            Ok(Self(alpha))
        } else {
            Err(domain(format!("andness {alpha} outside [-1, 2]")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn orness(self) -> T {
        T::one() - self.0
    }
}

/// Weight of the left (running) argument of a two-argument aggregator; the
/// newcomer receives `1 − w`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NodeWeight<T>(T);

impl<T: Scalar> NodeWeight<T> {
    pub fn new(w: T) -> Result<Self> {
        if w >= T::zero() && w <= T::one() {
            Ok(Self(w))
        } else {
            Err(domain(format!("weight {w} outside [0, 1]")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn complement(self) -> T {
        T::one() - self.0
    }
}
