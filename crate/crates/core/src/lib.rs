//! Continuous-time random walks with jump-sign memory.
//!
//! A CTRW is a pure jump process `X(t) = Σ Jₙ θ(t − tₙ)` whose arrival times
//! are Poisson with rate `λ` and whose jump sizes follow an asymmetric
//! double-exponential law. Three process families are covered:
//!
//! * **A** — memoryless: every jump is drawn from one law `h₀`.
//! * **B** — sign memory: the jump law is `h₁` after an upward jump and `h₂`
//!   after a downward one.
//! * **AB** — random mixture: with probability `r` the next jump is drawn
//!   from `h₀`, otherwise from the sign-conditional law of B.
//!
//! Mixing an unbiased A into an unbiased B distorts B's sign correlation, and
//! the mixture can acquire a strictly positive drift. The crate provides the
//! exact event-driven samplers ([`simulate`]), the complete closed-form drift
//! and stationary-sign analytics ([`model`]), and the Fourier-Laplace
//! propagators of all three processes together with a numerical Laplace
//! inversion for cross-validation ([`spectral`]).
//!
//! The crate is `no_std`-compatible (with `alloc`): disable the default
//! `std` feature and enable `libm` instead.
//!
//! ```
//! use ctrw_core::model::ProcessSpec;
//! use ctrw_core::presets;
//! use ctrw_core::simulate::{simulate_ensemble, SimConfig};
//!
//! let mix = presets::baseline();
//! assert_eq!(mix.a().drift(1.0).unwrap(), 0.0);             // A unbiased
//! assert!(mix.b().drift(1.0).unwrap().abs() < 1e-12);       // B unbiased
//! assert!((mix.drift(1.0).unwrap() - 1.125).abs() < 1e-12); // mixture drifts
//!
//! let cfg = SimConfig { n_paths: 20_000, ..SimConfig::default() };
//! let stats = simulate_ensemble(&ProcessSpec::Mixed(mix), &cfg).unwrap();
//! let last = stats.t_grid.len() - 1;
//! assert!((stats.mean[last] - 1.125).abs() < 3.0 * stats.stderr[last]);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable either the `std` or the `libm` feature");

mod fmath;

pub mod jumpdist;
pub mod model;
pub mod presets;
pub mod rng;
pub mod simulate;
pub mod spectral;

pub use jumpdist::{JumpLaw, JumpLawError};
pub use model::{
    optimal_r, solve_unbiased_q0, solve_unbiased_q2, MemorylessSpec, MixedSpec, ModelError,
    ProcessSpec, SignMemorySpec, SignState,
};
pub use rng::{RandomSource, SubstreamRng};
pub use simulate::{
    simulate_ensemble, simulate_path, EnsembleStats, InitialSign, Path, SimConfig, SimError,
};
pub use spectral::{invert_laplace, Conditioning, SpectralError, SpectralPoint};

