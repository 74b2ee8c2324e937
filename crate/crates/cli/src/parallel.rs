//! Data-parallel ensemble driver.
//!
//! Work splits along the fixed block partition of the path index space;
//! blocks are computed on the rayon pool and merged in index order, so the
//! result is bit-identical to the sequential [`simulate_ensemble`] for any
//! worker count.

use rayon::prelude::*;

use ctrw_core::model::ProcessSpec;
use ctrw_core::simulate::{
    accumulate_paths, block_ranges, simulate_ensemble, EnsembleAccumulator, EnsembleStats,
    SimConfig, SimError,
};

pub fn simulate_ensemble_parallel(
    spec: &ProcessSpec,
    cfg: &SimConfig,
) -> Result<EnsembleStats, SimError> {
    cfg.validate()?;
    let blocks: Vec<EnsembleAccumulator> = block_ranges(cfg.n_paths)
        .into_par_iter()
        .map(|range| accumulate_paths(spec, cfg, range))
        .collect::<Result<_, _>>()?;
    let mut total = EnsembleAccumulator::new(cfg.time_grid());
    for block in &blocks {
        total.merge(block)?;
    }
    total.finalize(cfg.master_seed)
}

/// Used by tests to confirm the parallel and sequential drivers agree.
pub fn matches_sequential(spec: &ProcessSpec, cfg: &SimConfig) -> Result<bool, SimError> {
    Ok(simulate_ensemble_parallel(spec, cfg)? == simulate_ensemble(spec, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctrw_core::presets;

    #[test]
    fn parallel_is_bit_identical_to_sequential() {
        let spec = ProcessSpec::Mixed(presets::baseline());
        let cfg = SimConfig {
            n_paths: 10_000,
            grid_points: 21,
            master_seed: 7,
            ..SimConfig::default()
        };
        assert!(matches_sequential(&spec, &cfg).unwrap());
    }

    #[test]
    fn parallel_is_stable_across_worker_counts() {
        let spec = ProcessSpec::Mixed(presets::baseline());
        let cfg = SimConfig {
            n_paths: 9_000,
            grid_points: 11,
            master_seed: 13,
            ..SimConfig::default()
        };
        let reference = simulate_ensemble(&spec, &cfg).unwrap();
        for workers in [1usize, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let stats = pool
                .install(|| simulate_ensemble_parallel(&spec, &cfg))
                .unwrap();
            assert_eq!(stats, reference, "worker count {workers}");
        }
    }
}
