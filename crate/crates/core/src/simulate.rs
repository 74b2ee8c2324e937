//! Event-driven Monte Carlo engine.
//!
//! Paths are simulated jump by jump: exponential waiting times, one jump
//! draw per arrival, sign state updated to the sign of every realized jump
//! (for the mixture this includes jumps that came from the memoryless
//! component). Ensemble statistics are folded per path onto a fixed time
//! grid without materializing event lists.
//!
//! Path `i` of an ensemble draws from `SubstreamRng::new(master_seed, i)`,
//! so ensembles are reproducible and can be partitioned across workers in
//! any way: [`accumulate_paths`] over consecutive ranges merged in index
//! order is bit-identical to the sequential [`simulate_ensemble`].

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fmath;
use crate::model::{ModelError, ProcessSpec, SignState};
use crate::rng::{RandomSource, SubstreamRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("need at least {need} grid points, got {got}")]
    TooFewGridPoints { got: usize, need: usize },
    #[error("need at least {need} paths, got {got}")]
    TooFewPaths { got: u64, need: u64 },
    #[error("need at least {need} jump events, got {got}")]
    InsufficientEvents { got: u64, need: u64 },
    #[error("invalid path: {0}")]
    InvalidPath(&'static str),
    #[error("accumulators cover different grids")]
    GridMismatch,
}

/// How to choose the sign state a path starts in, before any jump exists.
///
/// `Stationary` draws it from the stationary sign law (`beta` for B, `alpha`
/// for AB), which makes the unconditional drift formulas exact from `t = 0`.
/// The fixed modes expose the sign-conditioned processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialSign {
    #[default]
    Stationary,
    FixedPositive,
    FixedNegative,
}

/// Ensemble run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: u64,
    pub horizon: f64,
    pub grid_points: usize,
    pub master_seed: u64,
    pub initial_sign: InitialSign,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            horizon: 1.0,
            grid_points: 101,
            master_seed: 42,
            initial_sign: InitialSign::Stationary,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(SimError::InvalidHorizon(self.horizon));
        }
        if self.grid_points < 2 {
            return Err(SimError::TooFewGridPoints {
                got: self.grid_points,
                need: 2,
            });
        }
        if self.n_paths < 1 {
            return Err(SimError::TooFewPaths {
                got: self.n_paths,
                need: 1,
            });
        }
        Ok(())
    }

    /// Evenly spaced times from 0 to the horizon, inclusive.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        let mut grid = Vec::with_capacity(n);
        for k in 0..n {
            grid.push(self.horizon * k as f64 / (n - 1) as f64);
        }
        grid
    }
}

/// One realized path: the ordered jump events `(t_n, J_n)` on `(0, horizon]`.
///
/// The process value is the right-continuous step function
/// `X(t) = sum of J_n for t_n <= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    events: Vec<(f64, f64)>,
    horizon: f64,
}

impl Path {
    pub fn new(events: Vec<(f64, f64)>, horizon: f64) -> Result<Self, SimError> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(SimError::InvalidHorizon(horizon));
        }
        let mut prev = 0.0;
        for &(t, j) in &events {
            if t.is_nan() || t <= prev {
                return Err(SimError::InvalidPath("event times must strictly increase"));
            }
            if t > horizon {
                return Err(SimError::InvalidPath("event beyond the horizon"));
            }
            if !j.is_finite() {
                return Err(SimError::InvalidPath("non-finite jump size"));
            }
            prev = t;
        }
        Ok(Self { events, horizon })
    }

    pub fn events(&self) -> &[(f64, f64)] {
        &self.events
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `X(t)`: the sum of all jumps at or before `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        self.events
            .iter()
            .take_while(|&&(tn, _)| tn <= t)
            .map(|&(_, j)| j)
            .sum()
    }

    pub fn final_value(&self) -> f64 {
        self.events.iter().map(|&(_, j)| j).sum()
    }
}

/// Per-grid-point ensemble estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub t_grid: Vec<f64>,
    pub mean: Vec<f64>,
    /// Unbiased sample variance per grid point.
    pub variance: Vec<f64>,
    /// `sqrt(variance / n_paths)` per grid point.
    pub stderr: Vec<f64>,
    pub n_paths: u64,
    pub n_jumps: u64,
    pub n_positive_jumps: u64,
    pub positive_jump_fraction: f64,
    pub seed: u64,
}

/// Pooled positive-jump fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFraction {
    pub fraction: f64,
    pub stderr: f64,
    pub n_jumps: u64,
}

/// Mergeable per-worker accumulator for ensemble statistics.
///
/// Merging is plain sum composition: folding disjoint path ranges in index
/// order reproduces the sequential result bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleAccumulator {
    grid: Vec<f64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    n_paths: u64,
    n_jumps: u64,
    n_positive: u64,
}

impl EnsembleAccumulator {
    pub fn new(grid: Vec<f64>) -> Self {
        let n = grid.len();
        Self {
            grid,
            sum: vec![0.0; n],
            sum_sq: vec![0.0; n],
            n_paths: 0,
            n_jumps: 0,
            n_positive: 0,
        }
    }

    /// Fold one path's grid values (plus its jump counts) into the sums.
    fn add_path(&mut self, values: &[f64], jumps: u64, positive: u64) {
        debug_assert_eq!(values.len(), self.grid.len());
        for (k, &x) in values.iter().enumerate() {
            self.sum[k] += x;
            self.sum_sq[k] += x * x;
        }
        self.n_paths += 1;
        self.n_jumps += jumps;
        self.n_positive += positive;
    }

    pub fn merge(&mut self, other: &EnsembleAccumulator) -> Result<(), SimError> {
        if self.grid != other.grid {
            return Err(SimError::GridMismatch);
        }
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self.n_paths += other.n_paths;
        self.n_jumps += other.n_jumps;
        self.n_positive += other.n_positive;
        Ok(())
    }

    pub fn n_paths(&self) -> u64 {
        self.n_paths
    }

    pub fn finalize(self, master_seed: u64) -> Result<EnsembleStats, SimError> {
        if self.n_paths < 2 {
            return Err(SimError::TooFewPaths {
                got: self.n_paths,
                need: 2,
            });
        }
        let n = self.n_paths as f64;
        let mut mean = Vec::with_capacity(self.grid.len());
        let mut variance = Vec::with_capacity(self.grid.len());
        let mut stderr = Vec::with_capacity(self.grid.len());
        for k in 0..self.grid.len() {
            let m = self.sum[k] / n;
            let var = ((self.sum_sq[k] - self.sum[k] * self.sum[k] / n) / (n - 1.0)).max(0.0);
            mean.push(m);
            variance.push(var);
            stderr.push(fmath::sqrt(var / n));
        }
        let positive_jump_fraction = if self.n_jumps == 0 {
            0.0
        } else {
            self.n_positive as f64 / self.n_jumps as f64
        };
        Ok(EnsembleStats {
            t_grid: self.grid,
            mean,
            variance,
            stderr,
            n_paths: self.n_paths,
            n_jumps: self.n_jumps,
            n_positive_jumps: self.n_positive,
            positive_jump_fraction,
            seed: master_seed,
        })
    }
}

fn initial_sign_state<R: RandomSource + ?Sized>(
    spec: &ProcessSpec,
    mode: InitialSign,
    rng: &mut R,
) -> Result<SignState, SimError> {
    Ok(match mode {
        InitialSign::FixedPositive => SignState::Positive,
        InitialSign::FixedNegative => SignState::Negative,
        InitialSign::Stationary => match spec {
            // A has no sign memory; skip the draw to keep streams aligned.
            ProcessSpec::Memoryless(_) => SignState::Positive,
            _ => {
                let p = spec.positive_sign_probability()?;
                if rng.bernoulli(p) {
                    SignState::Positive
                } else {
                    SignState::Negative
                }
            }
        },
    })
}

#[inline]
fn draw_jump<R: RandomSource + ?Sized>(spec: &ProcessSpec, sign: SignState, rng: &mut R) -> f64 {
    match spec {
        ProcessSpec::Memoryless(s) => s.law().sample(rng),
        ProcessSpec::SignMemory(s) => sign_law(s, sign).sample(rng),
        ProcessSpec::Mixed(m) => {
            if rng.bernoulli(m.r()) {
                m.a().law().sample(rng)
            } else {
                sign_law(m.b(), sign).sample(rng)
            }
        }
    }
}

#[inline]
fn sign_law(b: &crate::model::SignMemorySpec, sign: SignState) -> &crate::jumpdist::JumpLaw {
    if sign.is_positive() {
        b.law_pos()
    } else {
        b.law_neg()
    }
}

/// Run one path, handing each event `(t_n, J_n)` to `on_jump` in time order.
/// Returns `(jump count, positive jump count)`.
fn walk_path<R, F>(
    spec: &ProcessSpec,
    horizon: f64,
    mode: InitialSign,
    rng: &mut R,
    mut on_jump: F,
) -> Result<(u64, u64), SimError>
where
    R: RandomSource + ?Sized,
    F: FnMut(f64, f64),
{
    let lambda = spec.lambda();
    let mut sign = initial_sign_state(spec, mode, rng)?;
    let mut t = 0.0;
    let mut jumps = 0u64;
    let mut positive = 0u64;
    loop {
        t += rng.exponential(lambda);
        if t > horizon {
            break;
        }
        let j = draw_jump(spec, sign, rng);
        sign = SignState::from_jump(j);
        jumps += 1;
        if sign.is_positive() {
            positive += 1;
        }
        on_jump(t, j);
    }
    Ok((jumps, positive))
}

/// Sample one path of the given process.
pub fn simulate_path<R: RandomSource + ?Sized>(
    spec: &ProcessSpec,
    horizon: f64,
    mode: InitialSign,
    rng: &mut R,
) -> Result<Path, SimError> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(SimError::InvalidHorizon(horizon));
    }
    let mut events = Vec::new();
    walk_path(spec, horizon, mode, rng, |t, j| events.push((t, j)))?;
    Ok(Path { events, horizon })
}

/// Fold the paths with indices in `range` into a fresh accumulator.
///
/// Path `i` uses the substream `SubstreamRng::new(cfg.master_seed, i)`
/// regardless of how the index space is partitioned.
pub fn accumulate_paths(
    spec: &ProcessSpec,
    cfg: &SimConfig,
    range: core::ops::Range<u64>,
) -> Result<EnsembleAccumulator, SimError> {
    cfg.validate()?;
    let grid = cfg.time_grid();
    let mut acc = EnsembleAccumulator::new(grid.clone());
    let mut values = vec![0.0; grid.len()];
    for path_index in range {
        let mut rng = SubstreamRng::new(cfg.master_seed, path_index);
        let mut x = 0.0;
        let mut gi = 0usize;
        let (jumps, positive) = walk_path(spec, cfg.horizon, cfg.initial_sign, &mut rng, |t, j| {
            // flush grid points strictly before this event, then apply the
            // jump: a jump landing exactly on a grid time is included there
            while gi < grid.len() && grid[gi] < t {
                values[gi] = x;
                gi += 1;
            }
            x += j;
        })?;
        while gi < grid.len() {
            values[gi] = x;
            gi += 1;
        }
        acc.add_path(&values, jumps, positive);
    }
    Ok(acc)
}

/// Paths per accumulation block. Ensemble sums are always composed block by
/// block in index order, so the floating-point association is fixed by the
/// configuration alone and not by how blocks are scheduled.
pub const ACCUMULATION_BLOCK: u64 = 4096;

/// The fixed block partition of the path index space `0..n_paths`.
pub fn block_ranges(n_paths: u64) -> Vec<core::ops::Range<u64>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    while start < n_paths {
        let end = (start + ACCUMULATION_BLOCK).min(n_paths);
        ranges.push(start..end);
        start = end;
    }
    ranges
}

/// Ensemble statistics over `cfg.n_paths` independent paths.
///
/// Deterministic: identical `(spec, cfg)` produce identical output bit for
/// bit, and any scheduler that computes the blocks of [`block_ranges`]
/// independently and merges them in index order reproduces it exactly.
pub fn simulate_ensemble(spec: &ProcessSpec, cfg: &SimConfig) -> Result<EnsembleStats, SimError> {
    cfg.validate()?;
    let mut total = EnsembleAccumulator::new(cfg.time_grid());
    for range in block_ranges(cfg.n_paths) {
        total.merge(&accumulate_paths(spec, cfg, range)?)?;
    }
    total.finalize(cfg.master_seed)
}

/// Pooled fraction of positive jumps across an ensemble, with binomial
/// standard error. Requires at least 100 pooled events.
pub fn empirical_sign_fraction(
    spec: &ProcessSpec,
    cfg: &SimConfig,
) -> Result<SignFraction, SimError> {
    let stats = simulate_ensemble(spec, cfg)?;
    if stats.n_jumps < 100 {
        return Err(SimError::InsufficientEvents {
            got: stats.n_jumps,
            need: 100,
        });
    }
    let n = stats.n_jumps as f64;
    let p = stats.positive_jump_fraction;
    Ok(SignFraction {
        fraction: p,
        stderr: fmath::sqrt(p * (1.0 - p) / n),
        n_jumps: stats.n_jumps,
    })
}
