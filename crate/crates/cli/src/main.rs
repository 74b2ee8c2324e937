use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ctrw_cli::config::{
    ExperimentKind, FileConfig, InitialSignArg, Overrides, OutputFormat, ResolvedConfig,
};
use ctrw_cli::error::CliError;
use ctrw_cli::experiments::{self, MixParams, ProcessChoice};
use ctrw_cli::output::print_summary;

/// Jump processes with sign memory: samplers, closed-form drifts, and the
/// drift-from-mixing effect, packaged as reproducible experiments.
#[derive(Parser)]
#[command(name = "ctrw", version, about, max_term_width = 100)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// TOML experiment manifest; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed for all random streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo paths per ensemble
    #[arg(long, global = true)]
    paths: Option<u64>,
    /// Simulation horizon
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Points on the output time grid
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Output directory for CSV/JSON artifacts
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Stdout summary format
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Sign state a path starts in
    #[arg(long, global = true, value_enum)]
    initial_sign: Option<InitialSignArg>,
    /// Shift applied to the jump probabilities (fig2; sweep upper bound)
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Comma-separated mixing probabilities (fig3 grid, sweep grid, or the
    /// single value used by analytic/simulate)
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    r: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Reference experiment: two unbiased components, drifting mixture
    Fig1,
    /// Shifted experiment: both components lose, the mixture still wins
    Fig2,
    /// Noise-control experiment: the drift sign follows the mixing level
    Fig3,
    /// Sweep the mixing probability and the shift size
    Sweep {
        #[command(flatten)]
        params: MixParams,
    },
    /// Print closed-form quantities for a parameter set
    Analytic {
        #[command(flatten)]
        params: MixParams,
        /// Time the drifts are evaluated at
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Raw ensemble run of one process
    Simulate {
        #[command(flatten)]
        params: MixParams,
        /// Which process to simulate
        #[arg(long, value_enum, default_value_t = ProcessChoice::Ab)]
        process: ProcessChoice,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn overrides(global: &GlobalOpts) -> Overrides {
    Overrides {
        seed: global.seed,
        paths: global.paths,
        horizon: global.horizon,
        grid_points: global.grid_points,
        initial_sign: global.initial_sign,
        out: global.out.clone(),
        format: global.format,
        epsilon: global.epsilon,
        r_values: global.r.clone(),
    }
}

/// The single mixing probability required by analytic/simulate.
fn single_r(cfg: &ResolvedConfig, default: f64) -> Result<f64, CliError> {
    match cfg.r_values.as_deref() {
        None => Ok(default),
        Some([r]) => Ok(*r),
        Some(list) => Err(CliError::Validation(format!(
            "expected exactly one mixing probability, got {}",
            list.len()
        ))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(path) => Some(FileConfig::load(path)?),
        None => None,
    };
    let flags = overrides(&cli.global);
    let kind = match &cli.command {
        Command::Fig1 => ExperimentKind::Fig1,
        Command::Fig2 => ExperimentKind::Fig2,
        Command::Fig3 => ExperimentKind::Fig3,
        Command::Sweep { .. } => ExperimentKind::Sweep,
        Command::Analytic { .. } | Command::Simulate { .. } => ExperimentKind::Custom,
    };
    let cfg = ResolvedConfig::resolve(kind, file.as_ref(), &flags)?;

    let summary = match &cli.command {
        Command::Fig1 => experiments::run_fig1(&cfg)?,
        Command::Fig2 => experiments::run_fig2(&cfg)?,
        Command::Fig3 => experiments::run_fig3(&cfg)?,
        Command::Sweep { params } => experiments::run_sweep(&cfg, params)?,
        Command::Analytic { params, time } => {
            let r = single_r(&cfg, 0.5)?;
            let report = experiments::run_analytic(params, r, *time)?;
            print_summary(cfg.format, &report)?;
            return Ok(());
        }
        Command::Simulate { params, process } => {
            let r = single_r(&cfg, 0.5)?;
            experiments::run_simulate(&cfg, params, *process, r)?
        }
    };
    print_summary(cfg.format, &summary)?;
    if !summary.self_check_passed {
        return Err(CliError::SelfCheck(format!(
            "Monte Carlo vs analytic beyond 4 standard errors: {}",
            summary.failed_checks().join(", ")
        )));
    }
    Ok(())
}
