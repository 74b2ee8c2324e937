//! The bundled experiments and raw runs.
//!
//! Every run writes plot-ready CSV data plus a `summary.json` pairing each
//! Monte Carlo estimate with its closed-form target and standard error. A
//! run "self-checks": any estimate farther than four standard errors from
//! its target marks the summary failed, which the binary turns into exit
//! code 2.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use ctrw_core::model::{MixedSpec, ProcessSpec};
use ctrw_core::presets;
use ctrw_core::rng::SubstreamRng;
use ctrw_core::simulate::{simulate_path, EnsembleStats, SignFraction};
use ctrw_core::{optimal_r, solve_unbiased_q0, solve_unbiased_q2, JumpLaw};

use crate::config::ResolvedConfig;
use crate::error::CliError;
use crate::output::{ensure_dir, write_csv, write_json, write_path_csv};
use crate::parallel::simulate_ensemble_parallel;

/// Sample-path streams live in the upper half of the stream space so they
/// never collide with ensemble path indices.
const DISPLAY_STREAM_BASE: u64 = 1 << 63;

/// Default mixing probabilities for the noise-control experiment.
pub const FIG3_DEFAULT_R: [f64; 4] = [0.0, 0.02, 0.2, 1.0];

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub analytic: f64,
    pub mc: f64,
    pub stderr: f64,
    pub z_score: f64,
    pub pass: bool,
}

fn check(name: impl Into<String>, analytic: f64, mc: f64, stderr: f64) -> CheckRow {
    let diff = mc - analytic;
    let z_score = if stderr > 0.0 {
        diff / stderr
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    CheckRow {
        name: name.into(),
        analytic,
        mc,
        stderr,
        z_score,
        pass: diff.abs() <= 4.0 * stderr,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McResult {
    pub process: String,
    pub mean_at_horizon: f64,
    pub stderr_at_horizon: f64,
    pub n_jumps: u64,
    pub positive_jump_fraction: f64,
}

impl McResult {
    fn from_stats(process: &str, stats: &EnsembleStats) -> Self {
        let last = stats.t_grid.len() - 1;
        Self {
            process: process.to_string(),
            mean_at_horizon: stats.mean[last],
            stderr_at_horizon: stats.stderr[last],
            n_jumps: stats.n_jumps,
            positive_jump_fraction: stats.positive_jump_fraction,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub n_paths: u64,
    pub horizon: f64,
    pub parameters: BTreeMap<String, f64>,
    pub analytic: BTreeMap<String, f64>,
    pub monte_carlo: Vec<McResult>,
    pub checks: Vec<CheckRow>,
    pub self_check_passed: bool,
}

impl Summary {
    fn new(experiment: &str, cfg: &ResolvedConfig) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed: cfg.sim.master_seed,
            n_paths: cfg.sim.n_paths,
            horizon: cfg.sim.horizon,
            parameters: BTreeMap::new(),
            analytic: BTreeMap::new(),
            monte_carlo: Vec::new(),
            checks: Vec::new(),
            self_check_passed: true,
        }
    }

    fn push_check(&mut self, row: CheckRow) {
        self.self_check_passed &= row.pass;
        self.checks.push(row);
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Full double-exponential parameter set for the three laws.
#[derive(Debug, Clone, Copy, clap::Args)]
pub struct MixParams {
    /// Poisson arrival rate shared by every process
    #[arg(long, default_value_t = presets::LAMBDA)]
    pub lambda: f64,
    /// Upward-jump probability of the memoryless law
    #[arg(long, default_value_t = presets::BASE_Q0)]
    pub q0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta0: f64,
    /// Upward-jump probability after an upward jump
    #[arg(long, default_value_t = presets::BASE_Q12)]
    pub q1: f64,
    #[arg(long, default_value_t = presets::GAMMA1)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta1: f64,
    /// Upward-jump probability after a downward jump
    #[arg(long, default_value_t = presets::BASE_Q12)]
    pub q2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta2: f64,
}

impl Default for MixParams {
    fn default() -> Self {
        Self {
            lambda: presets::LAMBDA,
            q0: presets::BASE_Q0,
            gamma0: 1.0,
            eta0: 1.0,
            q1: presets::BASE_Q12,
            gamma1: presets::GAMMA1,
            eta1: 1.0,
            q2: presets::BASE_Q12,
            gamma2: 1.0,
            eta2: 1.0,
        }
    }
}

impl MixParams {
    pub fn mixed(&self, r: f64) -> Result<MixedSpec, CliError> {
        Ok(MixedSpec::new(
            r,
            self.lambda,
            JumpLaw::new(self.q0, self.gamma0, self.eta0)?,
            JumpLaw::new(self.q1, self.gamma1, self.eta1)?,
            JumpLaw::new(self.q2, self.gamma2, self.eta2)?,
        )?)
    }

    pub fn shifted(&self, eps: f64) -> Result<MixParams, CliError> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(CliError::Validation(format!(
                "epsilon must be non-negative, got {eps}"
            )));
        }
        for (name, q) in [("q0", self.q0), ("q1", self.q1), ("q2", self.q2)] {
            if eps >= q {
                return Err(CliError::Validation(format!(
                    "epsilon = {eps} must stay below {name} = {q}"
                )));
            }
        }
        Ok(MixParams {
            q0: self.q0 - eps,
            q1: self.q1 - eps,
            q2: self.q2 - eps,
            ..*self
        })
    }

    fn to_map(self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("lambda".into(), self.lambda),
            ("q0".into(), self.q0),
            ("gamma0".into(), self.gamma0),
            ("eta0".into(), self.eta0),
            ("q1".into(), self.q1),
            ("gamma1".into(), self.gamma1),
            ("eta1".into(), self.eta1),
            ("q2".into(), self.q2),
            ("gamma2".into(), self.gamma2),
            ("eta2".into(), self.eta2),
        ])
    }
}

struct ProcessRun {
    name: &'static str,
    spec: ProcessSpec,
    stats: EnsembleStats,
}

fn run_processes(
    mix: &MixedSpec,
    cfg: &ResolvedConfig,
    dir: &Path,
    display_offset: u64,
) -> Result<Vec<ProcessRun>, CliError> {
    let specs: [(&'static str, ProcessSpec); 3] = [
        ("a", ProcessSpec::Memoryless(*mix.a())),
        ("b", ProcessSpec::SignMemory(*mix.b())),
        ("ab", ProcessSpec::Mixed(*mix)),
    ];
    let mut runs = Vec::new();
    for (i, (name, spec)) in specs.into_iter().enumerate() {
        let mut rng = SubstreamRng::new(
            cfg.sim.master_seed,
            DISPLAY_STREAM_BASE + display_offset + i as u64,
        );
        let sample = simulate_path(&spec, cfg.sim.horizon, cfg.sim.initial_sign, &mut rng)?;
        write_path_csv(&dir.join(format!("path_{name}.csv")), &sample)?;
        let stats = simulate_ensemble_parallel(&spec, &cfg.sim)?;
        runs.push(ProcessRun { name, spec, stats });
    }
    Ok(runs)
}

fn sign_fraction_of(stats: &EnsembleStats) -> SignFraction {
    let n = stats.n_jumps.max(1) as f64;
    let p = stats.positive_jump_fraction;
    SignFraction {
        fraction: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        n_jumps: stats.n_jumps,
    }
}

fn drift_checks(summary: &mut Summary, runs: &[ProcessRun], horizon: f64) -> Result<(), CliError> {
    for run in runs {
        let analytic = run.spec.drift(horizon)?;
        let mc = McResult::from_stats(run.name, &run.stats);
        summary.push_check(check(
            format!("drift_{}", run.name),
            analytic,
            mc.mean_at_horizon,
            mc.stderr_at_horizon,
        ));
        let sign = sign_fraction_of(&run.stats);
        summary.push_check(check(
            format!("sign_fraction_{}", run.name),
            run.spec.positive_sign_probability()?,
            sign.fraction,
            sign.stderr,
        ));
        summary.monte_carlo.push(mc);
    }
    Ok(())
}

/// Reference experiment: unbiased components, drifting mixture.
pub fn run_fig1(cfg: &ResolvedConfig) -> Result<Summary, CliError> {
    ensure_dir(&cfg.out_dir)?;
    let mix = presets::baseline();
    let runs = run_processes(&mix, cfg, &cfg.out_dir, 0)?;

    let grid = cfg.sim.time_grid();
    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        rows.push(vec![
            t,
            mix.a().drift(t)?,
            mix.b().drift(t)?,
            mix.drift(t)?,
        ]);
    }
    write_csv(
        &cfg.out_dir.join("drifts.csv"),
        &["t", "mu_a", "mu_b", "mu_ab"],
        &rows,
    )?;

    let mut summary = Summary::new("fig1", cfg);
    summary.parameters = MixParams::default().to_map();
    summary.parameters.insert("r".into(), mix.r());
    let h = cfg.sim.horizon;
    summary.analytic.insert("mu_a_at_horizon".into(), mix.a().drift(h)?);
    summary.analytic.insert("mu_b_at_horizon".into(), mix.b().drift(h)?);
    summary.analytic.insert("mu_ab_at_horizon".into(), mix.drift(h)?);
    summary.analytic.insert("beta".into(), mix.b().beta()?);
    summary.analytic.insert("alpha".into(), mix.alpha()?);
    summary.analytic.insert(
        "optimal_r".into(),
        optimal_r(mix.b().law_pos().q(), mix.b().law_neg().q()),
    );
    drift_checks(&mut summary, &runs, h)?;
    write_json(&cfg.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Shifted experiment: both components drift down, the mixture still drifts
/// up for small `eps`.
pub fn run_fig2(cfg: &ResolvedConfig) -> Result<Summary, CliError> {
    ensure_dir(&cfg.out_dir)?;
    let eps = cfg.epsilon.unwrap_or(crate::config::DEFAULT_EPSILON);
    let params = MixParams::default().shifted(eps)?;
    let mix = params.mixed(0.5)?;
    let runs = run_processes(&mix, cfg, &cfg.out_dir, 8)?;

    let lambda = params.lambda;
    let grid = cfg.sim.time_grid();
    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        rows.push(vec![
            t,
            presets::shifted_drift_a(eps, lambda, t),
            presets::shifted_drift_b(eps, lambda, t),
            presets::shifted_drift_mix(eps, lambda, t),
            mix.drift(t)?,
        ]);
    }
    write_csv(
        &cfg.out_dir.join("drifts.csv"),
        &["t", "mu_a", "mu_b", "mu_ab_series", "mu_ab_model"],
        &rows,
    )?;

    let mut summary = Summary::new("fig2", cfg);
    summary.parameters = params.to_map();
    summary.parameters.insert("r".into(), 0.5);
    summary.parameters.insert("epsilon".into(), eps);
    let h = cfg.sim.horizon;
    let mu_a = presets::shifted_drift_a(eps, lambda, h);
    let mu_b = presets::shifted_drift_b(eps, lambda, h);
    let mu_series = presets::shifted_drift_mix(eps, lambda, h);
    let mu_model = mix.drift(h)?;
    summary.analytic.insert("mu_a_at_horizon".into(), mu_a);
    summary.analytic.insert("mu_b_at_horizon".into(), mu_b);
    summary
        .analytic
        .insert("mu_ab_series_at_horizon".into(), mu_series);
    summary
        .analytic
        .insert("mu_ab_model_at_horizon".into(), mu_model);
    summary
        .analytic
        .insert("eps_star".into(), presets::shifted_positivity_root());
    summary.analytic.insert("beta".into(), mix.b().beta()?);
    summary.analytic.insert("alpha".into(), mix.alpha()?);

    drift_checks(&mut summary, &runs, h)?;
    // the quadratic reference must also sit within Monte Carlo resolution
    let ab = &runs[2];
    summary.push_check(check(
        "drift_ab_series",
        mu_series,
        ab.stats.mean[ab.stats.t_grid.len() - 1],
        ab.stats.stderr[ab.stats.t_grid.len() - 1],
    ));
    write_json(&cfg.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Noise-control experiment: the sign of the mixture drift follows `r`.
pub fn run_fig3(cfg: &ResolvedConfig) -> Result<Summary, CliError> {
    ensure_dir(&cfg.out_dir)?;
    let r_values = cfg
        .r_values
        .clone()
        .unwrap_or_else(|| FIG3_DEFAULT_R.to_vec());
    validate_r_grid(&r_values)?;

    let mut summary = Summary::new("fig3", cfg);
    let h = cfg.sim.horizon;
    let base = presets::noise_controlled(0.0)?;
    summary.parameters = MixParams {
        q1: 0.78,
        q2: 0.78,
        ..MixParams::default()
    }
    .to_map();
    summary
        .analytic
        .insert("r_star".into(), presets::noise_threshold());
    summary
        .analytic
        .insert("mu_a_at_horizon".into(), base.a().drift(h)?);
    summary
        .analytic
        .insert("mu_b_at_horizon".into(), base.b().drift(h)?);
    summary.analytic.insert("beta".into(), base.b().beta()?);

    let mut rows = Vec::new();
    for (i, &r) in r_values.iter().enumerate() {
        let mix = presets::noise_controlled(r)?;
        let spec = ProcessSpec::Mixed(mix);
        let mut rng =
            SubstreamRng::new(cfg.sim.master_seed, DISPLAY_STREAM_BASE + 16 + i as u64);
        let sample = simulate_path(&spec, h, cfg.sim.initial_sign, &mut rng)?;
        write_path_csv(&cfg.out_dir.join(format!("path_ab_r{r}.csv")), &sample)?;

        let stats = simulate_ensemble_parallel(&spec, &cfg.sim)?;
        let analytic = mix.drift(h)?;
        let mc = McResult::from_stats("ab", &stats);
        rows.push(vec![r, analytic, mc.mean_at_horizon, mc.stderr_at_horizon]);
        summary.push_check(check(
            format!("drift_ab_r{r}"),
            analytic,
            mc.mean_at_horizon,
            mc.stderr_at_horizon,
        ));
        let sign = sign_fraction_of(&stats);
        summary.push_check(check(
            format!("sign_fraction_ab_r{r}"),
            mix.alpha()?,
            sign.fraction,
            sign.stderr,
        ));
        summary.monte_carlo.push(McResult {
            process: format!("ab_r{r}"),
            ..mc
        });
    }
    write_csv(
        &cfg.out_dir.join("fig3_drifts.csv"),
        &["r", "analytic_mu", "mc_mu", "stderr"],
        &rows,
    )?;
    write_json(&cfg.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn validate_r_grid(r_values: &[f64]) -> Result<(), CliError> {
    if r_values.is_empty() {
        return Err(CliError::Validation(
            "the mixing-probability grid is empty".into(),
        ));
    }
    for &r in r_values {
        if !r.is_finite() || !(0.0..=1.0).contains(&r) {
            return Err(CliError::Validation(format!(
                "mixing probability {r} is outside [0, 1]"
            )));
        }
    }
    Ok(())
}

/// Parameter sweep over the mixing probability and the shift size.
pub fn run_sweep(cfg: &ResolvedConfig, params: &MixParams) -> Result<Summary, CliError> {
    ensure_dir(&cfg.out_dir)?;
    let r_values = cfg
        .r_values
        .clone()
        .unwrap_or_else(|| (0..=20).map(|k| k as f64 / 20.0).collect());
    validate_r_grid(&r_values)?;

    let mut summary = Summary::new("sweep", cfg);
    summary.parameters = params.to_map();
    let h = cfg.sim.horizon;

    // mixing-probability sweep
    let mut r_rows = Vec::new();
    let (mut argmax_mc, mut best_mc) = (r_values[0], f64::NEG_INFINITY);
    let (mut argmax_an, mut best_an) = (r_values[0], f64::NEG_INFINITY);
    for &r in &r_values {
        let mix = params.mixed(r)?;
        let analytic = mix.drift(h)?;
        let stats = simulate_ensemble_parallel(&ProcessSpec::Mixed(mix), &cfg.sim)?;
        let mc = McResult::from_stats("ab", &stats);
        if analytic > best_an {
            best_an = analytic;
            argmax_an = r;
        }
        if mc.mean_at_horizon > best_mc {
            best_mc = mc.mean_at_horizon;
            argmax_mc = r;
        }
        summary.push_check(check(
            format!("drift_ab_r{r}"),
            analytic,
            mc.mean_at_horizon,
            mc.stderr_at_horizon,
        ));
        r_rows.push(vec![r, analytic, mc.mean_at_horizon, mc.stderr_at_horizon]);
    }
    write_csv(
        &cfg.out_dir.join("sweep_r.csv"),
        &["r", "analytic_mu", "mc_mu", "stderr"],
        &r_rows,
    )?;
    summary
        .analytic
        .insert("grid_argmax_r_analytic".into(), argmax_an);
    summary.analytic.insert("grid_argmax_r_mc".into(), argmax_mc);
    summary
        .analytic
        .insert("optimal_r".into(), optimal_r(params.q1, params.q2));

    // shift sweep: lower all q's by eps; grid capped where the q's allow it
    let eps_max = cfg
        .epsilon
        .unwrap_or(0.05)
        .min(params.q0.min(params.q1).min(params.q2) - 1e-6);
    let mut eps_rows = Vec::new();
    for k in 0..=10 {
        let eps = eps_max * k as f64 / 10.0;
        let shifted = params.shifted(eps)?;
        let mix = shifted.mixed(0.5)?;
        let mut row = vec![eps];
        for (name, spec) in [
            ("a", ProcessSpec::Memoryless(*mix.a())),
            ("b", ProcessSpec::SignMemory(*mix.b())),
            ("ab", ProcessSpec::Mixed(mix)),
        ] {
            let analytic = spec.drift(h)?;
            let stats = simulate_ensemble_parallel(&spec, &cfg.sim)?;
            let mc = McResult::from_stats(name, &stats);
            summary.push_check(check(
                format!("drift_{name}_eps{eps}"),
                analytic,
                mc.mean_at_horizon,
                mc.stderr_at_horizon,
            ));
            row.extend([analytic, mc.mean_at_horizon, mc.stderr_at_horizon]);
        }
        eps_rows.push(row);
    }
    write_csv(
        &cfg.out_dir.join("sweep_eps.csv"),
        &[
            "epsilon",
            "analytic_mu_a",
            "mc_mu_a",
            "stderr_a",
            "analytic_mu_b",
            "mc_mu_b",
            "stderr_b",
            "analytic_mu_ab",
            "mc_mu_ab",
            "stderr_ab",
        ],
        &eps_rows,
    )?;
    write_json(&cfg.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Closed-form quantities for one parameter set, no simulation.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticReport {
    pub parameters: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
}

pub fn run_analytic(params: &MixParams, r: f64, t: f64) -> Result<AnalyticReport, CliError> {
    let mix = params.mixed(r)?;
    let mut values = BTreeMap::new();
    values.insert("mu0".into(), mix.a().law().mean());
    values.insert("mu1".into(), mix.b().law_pos().mean());
    values.insert("mu2".into(), mix.b().law_neg().mean());
    values.insert("beta".into(), mix.b().beta()?);
    values.insert("alpha".into(), mix.alpha()?);
    values.insert("drift_a".into(), mix.a().drift(t)?);
    values.insert("drift_b".into(), mix.b().drift(t)?);
    values.insert("drift_ab".into(), mix.drift(t)?);
    values.insert("optimal_r".into(), optimal_r(params.q1, params.q2));
    values.insert(
        "unbiased_q0".into(),
        solve_unbiased_q0(params.gamma0, params.eta0)?,
    );
    if let Ok(q2) = solve_unbiased_q2(
        params.q1,
        params.gamma1,
        params.eta1,
        params.gamma2,
        params.eta2,
    ) {
        values.insert("unbiased_q2".into(), q2);
    }
    if let Ok(derivative) = mix.drift_derivative(t) {
        values.insert("drift_derivative".into(), derivative);
    }
    let mut parameters = params.to_map();
    parameters.insert("r".into(), r);
    parameters.insert("t".into(), t);
    Ok(AnalyticReport { parameters, values })
}

/// Which process a raw run simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProcessChoice {
    A,
    B,
    Ab,
}

/// Raw ensemble run of one process.
pub fn run_simulate(
    cfg: &ResolvedConfig,
    params: &MixParams,
    choice: ProcessChoice,
    r: f64,
) -> Result<Summary, CliError> {
    ensure_dir(&cfg.out_dir)?;
    let mix = params.mixed(r)?;
    let (name, spec) = match choice {
        ProcessChoice::A => ("a", ProcessSpec::Memoryless(*mix.a())),
        ProcessChoice::B => ("b", ProcessSpec::SignMemory(*mix.b())),
        ProcessChoice::Ab => ("ab", ProcessSpec::Mixed(mix)),
    };
    let stats = simulate_ensemble_parallel(&spec, &cfg.sim)?;
    let mut rows = Vec::with_capacity(stats.t_grid.len());
    for k in 0..stats.t_grid.len() {
        rows.push(vec![
            stats.t_grid[k],
            stats.mean[k],
            stats.variance[k],
            stats.stderr[k],
        ]);
    }
    write_csv(
        &cfg.out_dir.join("ensemble.csv"),
        &["t", "mean", "variance", "stderr"],
        &rows,
    )?;

    let mut summary = Summary::new("simulate", cfg);
    summary.parameters = params.to_map();
    summary.parameters.insert("r".into(), r);
    let h = cfg.sim.horizon;
    summary
        .analytic
        .insert("drift_at_horizon".into(), spec.drift(h)?);
    summary.analytic.insert(
        "positive_sign_probability".into(),
        spec.positive_sign_probability()?,
    );
    let mc = McResult::from_stats(name, &stats);
    summary.push_check(check(
        format!("drift_{name}"),
        spec.drift(h)?,
        mc.mean_at_horizon,
        mc.stderr_at_horizon,
    ));
    let sign = sign_fraction_of(&stats);
    summary.push_check(check(
        format!("sign_fraction_{name}"),
        spec.positive_sign_probability()?,
        sign.fraction,
        sign.stderr,
    ));
    summary.monte_carlo.push(mc);
    write_json(&cfg.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}
