//! Process specifications and the closed-form drift layer.
//!
//! Three jump processes share Poisson arrivals with rate `lambda`:
//!
//! * [`MemorylessSpec`] (process A): i.i.d. jumps from a single law, drift
//!   `mu_a(t) = mu0 lambda t`.
//! * [`SignMemorySpec`] (process B): the law of the next jump depends on the
//!   sign of the previous one (`h1` after `+`, `h2` after `-`). The sign
//!   sequence is a two-state Markov chain whose stationary probability of an
//!   upward jump is `beta = q2 / (1 - q1 + q2)`, and
//!   `mu_b(t) = [beta mu1 + (1-beta) mu2] lambda t`.
//! * [`MixedSpec`] (process AB): each jump comes from A's law with
//!   probability `r`, else from B's sign-conditional law. Mixing changes the
//!   sign chain, so the stationary upward probability becomes
//!   `alpha = [r q0 + (1-r) q2] / [1 - (1-r)(q1 - q2)]` and
//!   `mu(t) = r mu_a(t) + (1-r)[alpha mu1 + (1-alpha) mu2] lambda t`,
//!   which is *not* `r mu_a + (1-r) mu_b` unless `alpha = beta`.
//!
//! Everything here is an exact closed form; no quadrature or iteration.

use thiserror::Error;

use crate::fmath;
use crate::jumpdist::{JumpLaw, JumpLawError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Law(#[from] JumpLawError),
    #[error("{name} must be a positive finite rate, got {value}")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),
    #[error("sign chain is degenerate: q1 = {q1}, q2 = {q2} leave no stationary sign law")]
    DegenerateSignChain { q1: f64, q2: f64 },
    #[error(
        "no unbiasing q2 exists in [0, 1]: gamma2 > eta1 requires q1 > {bound}, got q1 = {q1}"
    )]
    UnbiasedConstraint { q1: f64, bound: f64 },
    #[error("process {process} must be unbiased, but its drift at t = 1 is {drift}")]
    BiasedComponent { process: char, drift: f64 },
}

fn check_lambda(lambda: f64) -> Result<(), ModelError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(ModelError::InvalidRate {
            name: "lambda",
            value: lambda,
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<(), ModelError> {
    if !t.is_finite() || t < 0.0 {
        return Err(ModelError::InvalidTime(t));
    }
    Ok(())
}

/// Sign of the last jump — the one bit of memory carried by processes B
/// and AB. A zero-size jump counts as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignState {
    Positive,
    Negative,
}

impl SignState {
    #[inline]
    pub fn from_jump(x: f64) -> Self {
        if x >= 0.0 {
            SignState::Positive
        } else {
            SignState::Negative
        }
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        matches!(self, SignState::Positive)
    }
}

/// Process A: i.i.d. jumps, Poisson arrivals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemorylessSpec {
    lambda: f64,
    law: JumpLaw,
}

impl MemorylessSpec {
    pub fn new(lambda: f64, law: JumpLaw) -> Result<Self, ModelError> {
        check_lambda(lambda)?;
        Ok(Self { lambda, law })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn law(&self) -> &JumpLaw {
        &self.law
    }

    /// Mean displacement at time `t`: `mu0 lambda t`.
    pub fn drift(&self, t: f64) -> Result<f64, ModelError> {
        check_time(t)?;
        Ok(self.law.mean() * self.lambda * t)
    }
}

/// Process B: the next jump law is selected by the previous jump's sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignMemorySpec {
    lambda: f64,
    law_pos: JumpLaw,
    law_neg: JumpLaw,
}

impl SignMemorySpec {
    pub fn new(lambda: f64, law_pos: JumpLaw, law_neg: JumpLaw) -> Result<Self, ModelError> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            law_pos,
            law_neg,
        })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Law used after an upward jump (`h1`).
    #[inline]
    pub fn law_pos(&self) -> &JumpLaw {
        &self.law_pos
    }

    /// Law used after a downward jump (`h2`).
    #[inline]
    pub fn law_neg(&self) -> &JumpLaw {
        &self.law_neg
    }

    /// Stationary probability that a jump is positive,
    /// `beta = q2 / (1 - (q1 - q2))`.
    ///
    /// Undefined only for the degenerate chain `q1 = 1, q2 = 0`, where every
    /// sign is absorbing.
    pub fn beta(&self) -> Result<f64, ModelError> {
        let q1 = self.law_pos.q();
        let q2 = self.law_neg.q();
        let denom = 1.0 - (q1 - q2);
        if denom == 0.0 {
            return Err(ModelError::DegenerateSignChain { q1, q2 });
        }
        Ok(q2 / denom)
    }

    /// Mean displacement at time `t`: `[beta mu1 + (1-beta) mu2] lambda t`.
    pub fn drift(&self, t: f64) -> Result<f64, ModelError> {
        check_time(t)?;
        let beta = self.beta()?;
        let per_jump = beta * self.law_pos.mean() + (1.0 - beta) * self.law_neg.mean();
        Ok(per_jump * self.lambda * t)
    }
}

/// Process AB: the random mixture of A and B with mixing probability `r`.
///
/// A single arrival rate governs the whole mixture; the embedded A and B
/// components are constructed with the same `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedSpec {
    r: f64,
    a: MemorylessSpec,
    b: SignMemorySpec,
}

impl MixedSpec {
    pub fn new(
        r: f64,
        lambda: f64,
        a_law: JumpLaw,
        law_pos: JumpLaw,
        law_neg: JumpLaw,
    ) -> Result<Self, ModelError> {
        if !r.is_finite() || !(0.0..=1.0).contains(&r) {
            return Err(ModelError::InvalidProbability {
                name: "r",
                value: r,
            });
        }
        Ok(Self {
            r,
            a: MemorylessSpec::new(lambda, a_law)?,
            b: SignMemorySpec::new(lambda, law_pos, law_neg)?,
        })
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.a.lambda
    }

    /// The pure-A component (same `lambda`).
    #[inline]
    pub fn a(&self) -> &MemorylessSpec {
        &self.a
    }

    /// The pure-B component (same `lambda`).
    #[inline]
    pub fn b(&self) -> &SignMemorySpec {
        &self.b
    }

    /// Same mixture with a different mixing probability.
    pub fn with_r(&self, r: f64) -> Result<Self, ModelError> {
        if !r.is_finite() || !(0.0..=1.0).contains(&r) {
            return Err(ModelError::InvalidProbability {
                name: "r",
                value: r,
            });
        }
        Ok(Self { r, ..*self })
    }

    /// Stationary probability that a jump is positive,
    /// `alpha = [r q0 + (1-r) q2] / [1 - (1-r)(q1 - q2)]`.
    ///
    /// Reduces to `beta` at `r = 0` and to `q0` at `r = 1` (bit-exactly: the
    /// denominator is arranged as in [`SignMemorySpec::beta`]).
    pub fn alpha(&self) -> Result<f64, ModelError> {
        let q0 = self.a.law.q();
        let q1 = self.b.law_pos.q();
        let q2 = self.b.law_neg.q();
        let denom = 1.0 - (1.0 - self.r) * (q1 - q2);
        if denom == 0.0 {
            return Err(ModelError::DegenerateSignChain { q1, q2 });
        }
        Ok((self.r * q0 + (1.0 - self.r) * q2) / denom)
    }

    /// Mean displacement at time `t`:
    /// `r mu_a(t) + (1-r)[alpha mu1 + (1-alpha) mu2] lambda t`.
    ///
    /// Not the linear superposition of the component drifts unless
    /// `alpha = beta`.
    pub fn drift(&self, t: f64) -> Result<f64, ModelError> {
        check_time(t)?;
        let alpha = self.alpha()?;
        let per_jump = alpha * self.b.law_pos.mean() + (1.0 - alpha) * self.b.law_neg.mean();
        Ok(self.r * self.a.drift(t)? + (1.0 - self.r) * per_jump * self.lambda() * t)
    }

    /// `d mu(t) / d r`, valid when both components are unbiased.
    ///
    /// With `d = q1 - q2` and `D = 1 - (1-r) d`:
    ///
    /// ```text
    /// d mu/d r = -[q0 mu1 + (1-q0) mu2] (d r^2 + 2(1-d) r - (1-d)) / D^2 * lambda t
    /// ```
    ///
    /// The quadratic's root inside `[0, 1]` is [`optimal_r`]; the other root
    /// `-u/(1-u)` with `u = sqrt(1-d)` lies outside `[0, 1]` for every
    /// non-degenerate `(q1, q2)`.
    ///
    /// Errors if either component carries a drift larger than `1e-9` at
    /// `t = 1`; the formula does not hold for biased components.
    pub fn drift_derivative(&self, t: f64) -> Result<f64, ModelError> {
        check_time(t)?;
        let drift_a = self.a.drift(1.0)?;
        if fmath::abs(drift_a) > 1e-9 {
            return Err(ModelError::BiasedComponent {
                process: 'A',
                drift: drift_a,
            });
        }
        let drift_b = self.b.drift(1.0)?;
        if fmath::abs(drift_b) > 1e-9 {
            return Err(ModelError::BiasedComponent {
                process: 'B',
                drift: drift_b,
            });
        }
        let q0 = self.a.law.q();
        let d = self.b.law_pos.q() - self.b.law_neg.q();
        let denom = 1.0 - (1.0 - self.r) * d;
        if denom == 0.0 {
            return Err(ModelError::DegenerateSignChain {
                q1: self.b.law_pos.q(),
                q2: self.b.law_neg.q(),
            });
        }
        let enhancement = q0 * self.b.law_pos.mean() + (1.0 - q0) * self.b.law_neg.mean();
        let quad = d * self.r * self.r + 2.0 * (1.0 - d) * self.r - (1.0 - d);
        Ok(-enhancement * quad / (denom * denom) * self.lambda() * t)
    }
}

/// Any of the three processes, for code that is generic over the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessSpec {
    Memoryless(MemorylessSpec),
    SignMemory(SignMemorySpec),
    Mixed(MixedSpec),
}

impl ProcessSpec {
    pub fn lambda(&self) -> f64 {
        match self {
            ProcessSpec::Memoryless(s) => s.lambda(),
            ProcessSpec::SignMemory(s) => s.lambda(),
            ProcessSpec::Mixed(s) => s.lambda(),
        }
    }

    pub fn drift(&self, t: f64) -> Result<f64, ModelError> {
        match self {
            ProcessSpec::Memoryless(s) => s.drift(t),
            ProcessSpec::SignMemory(s) => s.drift(t),
            ProcessSpec::Mixed(s) => s.drift(t),
        }
    }

    /// Stationary probability that a jump is positive: `q0`, `beta`, or
    /// `alpha` depending on the family.
    pub fn positive_sign_probability(&self) -> Result<f64, ModelError> {
        match self {
            ProcessSpec::Memoryless(s) => Ok(s.law().q()),
            ProcessSpec::SignMemory(s) => s.beta(),
            ProcessSpec::Mixed(s) => s.alpha(),
        }
    }
}

impl From<MemorylessSpec> for ProcessSpec {
    fn from(s: MemorylessSpec) -> Self {
        ProcessSpec::Memoryless(s)
    }
}

impl From<SignMemorySpec> for ProcessSpec {
    fn from(s: SignMemorySpec) -> Self {
        ProcessSpec::SignMemory(s)
    }
}

impl From<MixedSpec> for ProcessSpec {
    fn from(s: MixedSpec) -> Self {
        ProcessSpec::Mixed(s)
    }
}

/// The `q0` that makes a memoryless law with rates `(gamma0, eta0)`
/// unbiased: `q0 = gamma0 / (gamma0 + eta0)`.
pub fn solve_unbiased_q0(gamma0: f64, eta0: f64) -> Result<f64, ModelError> {
    for (name, value) in [("gamma0", gamma0), ("eta0", eta0)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(ModelError::InvalidRate { name, value });
        }
    }
    Ok(gamma0 / (gamma0 + eta0))
}

/// The `q2` that removes the bias from a sign-memory process with the given
/// `q1` and rates:
///
/// ```text
/// q2 = 1 / (1 + eta2 (1/gamma2 - 1/eta1 + (1/gamma1) q1/(1-q1)))
/// ```
///
/// Always solvable for `gamma2 <= eta1`. For `gamma2 > eta1` a solution in
/// `[0, 1]` exists only when `q1` strictly exceeds
/// `(1/eta1 - 1/gamma2) / ((1/eta1 - 1/gamma2) + 1/gamma1)`; below that
/// bound the (unique) root of the bias in `q2` falls outside `[0, 1]` and an
/// error is returned.
pub fn solve_unbiased_q2(
    q1: f64,
    gamma1: f64,
    eta1: f64,
    gamma2: f64,
    eta2: f64,
) -> Result<f64, ModelError> {
    if !q1.is_finite() || !(0.0..1.0).contains(&q1) {
        return Err(ModelError::InvalidProbability {
            name: "q1",
            value: q1,
        });
    }
    for (name, value) in [
        ("gamma1", gamma1),
        ("eta1", eta1),
        ("gamma2", gamma2),
        ("eta2", eta2),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(ModelError::InvalidRate { name, value });
        }
    }
    if gamma2 > eta1 {
        let gap = 1.0 / eta1 - 1.0 / gamma2;
        let bound = gap / (gap + 1.0 / gamma1);
        if q1 <= bound {
            return Err(ModelError::UnbiasedConstraint { q1, bound });
        }
    }
    let q2 = 1.0 / (1.0 + eta2 * (1.0 / gamma2 - 1.0 / eta1 + q1 / (gamma1 * (1.0 - q1))));
    debug_assert!((0.0..=1.0).contains(&q2));
    Ok(q2)
}

/// The mixing probability maximizing the mixture drift when both components
/// are unbiased and the enhancement is positive.
///
/// With `u = sqrt(1 - (q1 - q2))` the root is `r = u / (1 + u)`: the fully
/// rationalized form of `(u - u^2)/(q1 - q2)`, free of cancellation for any
/// `q1, q2` and exactly `1/2` at `q1 = q2`.
pub fn optimal_r(q1: f64, q2: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&q1) && (0.0..=1.0).contains(&q2));
    let u = fmath::sqrt(1.0 - (q1 - q2));
    u / (1.0 + u)
}
