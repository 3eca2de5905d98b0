//! Exponential-polynomial-trigonometric algebra in `u = t^α/α`.
//!
//! Every expression is a canonical sum of `c·u^k·e^{a·u}·trig(b·u)` terms.
//! The set is closed under `+`, `×` (trig products go through product-to-sum),
//! `d/du` and `∫ du`, which is all the solver needs: `T_α` acts as `d/du` and
//! the conformable integral is the `u`-antiderivative.

mod expr;
mod integrate;
mod render;
mod term;

use core::fmt;

pub use expr::{canonicalize, UExpr, KEY_TOL, PRUNE_REL};
pub use render::{format_decimal, format_number, TForm};
pub use term::{Trig, UTerm, ZERO_SNAP};

use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraError {
    /// α outside `(0, 1]`.
    InvalidAlpha(f64),
    /// Evaluation requested at `t <= 0`.
    NonPositiveTime(f64),
    /// Divisor carries a power of `u` or a trig factor.
    DivisorOutsideAlgebra,
    ZeroDivisor,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::InvalidAlpha(a) => write!(f, "alpha must lie in (0, 1], got {a}"),
            AlgebraError::NonPositiveTime(t) => write!(f, "t must be positive, got {t}"),
            AlgebraError::DivisorOutsideAlgebra => f.write_str("divisor must be a single term C·e^{a·u}"),
            AlgebraError::ZeroDivisor => f.write_str("division by a zero term"),
        }
    }
}

impl core::error::Error for AlgebraError {}

/// The substitution `u = t^α/α` for a fixed order α ∈ (0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubstMap {
    alpha: f64,
}

impl SubstMap {
    pub fn new(alpha: f64) -> Result<Self, AlgebraError> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(SubstMap { alpha })
        } else {
            Err(AlgebraError::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u_of(&self, t: f64) -> Result<f64, AlgebraError> {
        if t > 0.0 {
            Ok(math::pow(t, self.alpha) / self.alpha)
        } else {
            Err(AlgebraError::NonPositiveTime(t))
        }
    }
}
