//! The asymmetric double-exponential jump law.
//!
//! A jump is non-negative with probability `q`, in which case its size is
//! `Exponential(gamma)`; otherwise it is the negative of an
//! `Exponential(eta)` draw. Density:
//!
//! ```text
//! h(x) = q gamma e^{-gamma x}   for x >= 0
//!        (1-q) eta e^{eta x}    for x <  0
//! ```
//!
//! By convention a zero-size jump counts as an upward one, so the sign of a
//! jump is `+` iff `x >= 0`.

use num_complex::Complex64;
use thiserror::Error;

use crate::fmath;
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JumpLawError {
    #[error("jump probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("{name} must be a positive finite rate, got {value}")]
    InvalidRate { name: &'static str, value: f64 },
}

/// Validated double-exponential jump law `(q, gamma, eta)`.
///
/// Parameters are checked once at construction; all evaluation paths assume
/// a valid law. Values are immutable and freely shareable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpLaw {
    q: f64,
    gamma: f64,
    eta: f64,
}

impl JumpLaw {
    pub fn new(q: f64, gamma: f64, eta: f64) -> Result<Self, JumpLawError> {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(JumpLawError::InvalidProbability(q));
        }
        for (name, value) in [("gamma", gamma), ("eta", eta)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(JumpLawError::InvalidRate { name, value });
            }
        }
        Ok(Self { q, gamma, eta })
    }

    /// Zero-mean symmetric special case, `q = 1/2` and equal rates.
    pub fn symmetric(rate: f64) -> Result<Self, JumpLawError> {
        Self::new(0.5, rate, rate)
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Probability density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.q * self.gamma * fmath::exp(-self.gamma * x)
        } else {
            (1.0 - self.q) * self.eta * fmath::exp(self.eta * x)
        }
    }

    /// Mean jump size `q/gamma - (1-q)/eta`.
    pub fn mean(&self) -> f64 {
        self.q / self.gamma - (1.0 - self.q) / self.eta
    }

    /// One jump: `+Exponential(gamma)` with probability `q`, else
    /// `-Exponential(eta)`. Exponentials are inverse-CDF draws from a
    /// uniform on `(0, 1]`.
    #[inline]
    pub fn sample<R: RandomSource + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.bernoulli(self.q) {
            rng.exponential(self.gamma)
        } else {
            -rng.exponential(self.eta)
        }
    }

    /// Characteristic function `E[e^{i omega J}]`.
    pub fn cf(&self, omega: f64) -> Complex64 {
        self.cf_positive_part(omega) + self.cf_negative_part(omega)
    }

    /// Transform of the upward branch, `q gamma / (gamma - i omega)`.
    pub(crate) fn cf_positive_part(&self, omega: f64) -> Complex64 {
        self.q * self.gamma / Complex64::new(self.gamma, -omega)
    }

    /// Transform of the downward branch, `(1-q) eta / (eta + i omega)`.
    pub(crate) fn cf_negative_part(&self, omega: f64) -> Complex64 {
        (1.0 - self.q) * self.eta / Complex64::new(self.eta, omega)
    }
}
