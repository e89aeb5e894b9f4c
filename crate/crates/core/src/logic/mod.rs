//! Graded logic kernel: degrees of truth, the two-argument andness-directed
//! conjunction/disjunction (GCD), and the operator code table.
//!
//! Andness `α` spans `[-1, 2]`: `α = 0.5` is the weighted arithmetic mean,
//! `α ≥ 0.75` is the weighted geometric family raised to
//! `√(3/(2−α)) − 1`, `0.5 < α < 0.75` blends the two, and `α < 0.5` is the
//! De Morgan dual `1 − gcd2(1−x, 1−y, w, 1−α)`. The endpoints `2` and `-1`
//! are the drastic conjunction and disjunction.
//!
//! The blend region is evaluated exactly as defined and is not idempotent:
//! `gcd2(0.5, 0.5, 0.5, 0.6) ≈ 0.510`, and `gcd2(x, x, 0.5, 1) = x^(2(√3−1))`.

mod code;
mod gcd;
mod types;

pub use code::{andness_to_code, classify_role, AndnessAnchor, AndnessCode, Role};
pub use gcd::{gcd2, gcd2_guarded, gcd2_guarded_with_grad, gcd2_value, negate, try_gcd2, Gcd2Grad, GUARD_EPS};
pub use types::{Andness, NodeWeight, TruthValue};
