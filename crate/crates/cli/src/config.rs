//! Experiment configuration: TOML manifest + flag overrides.
//!
//! Precedence is defaults < manifest < command-line flags, so a manifest
//! pins a reproducible run and flags tweak it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ctrw_core::simulate::{InitialSign, SimConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitialSignArg {
    Stationary,
    Positive,
    Negative,
}

impl From<InitialSignArg> for InitialSign {
    fn from(v: InitialSignArg) -> Self {
        match v {
            InitialSignArg::Stationary => InitialSign::Stationary,
            InitialSignArg::Positive => InitialSign::FixedPositive,
            InitialSignArg::Negative => InitialSign::FixedNegative,
        }
    }
}

/// Experiment selector, as it may appear in a manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Fig1,
    Fig2,
    Fig3,
    Sweep,
    Custom,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3 => "fig3",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Custom => "custom",
        }
    }
}

/// On-disk manifest; every field optional so flags can fill the rest.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub experiment: Option<ExperimentKind>,
    pub epsilon: Option<f64>,
    pub r_values: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub sim: SimFileConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimFileConfig {
    pub n_paths: Option<u64>,
    pub horizon: Option<f64>,
    pub grid_points: Option<usize>,
    pub master_seed: Option<u64>,
    pub initial_sign: Option<InitialSignArg>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

/// Flag-level overrides, already parsed.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<u64>,
    pub horizon: Option<f64>,
    pub grid_points: Option<usize>,
    pub initial_sign: Option<InitialSignArg>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub epsilon: Option<f64>,
    pub r_values: Option<Vec<f64>>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub sim: SimConfig,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Perturbation size; `None` when neither flag nor manifest set one.
    pub epsilon: Option<f64>,
    pub r_values: Option<Vec<f64>>,
}

pub const DEFAULT_EPSILON: f64 = 0.02;

impl ResolvedConfig {
    pub fn resolve(
        kind: ExperimentKind,
        file: Option<&FileConfig>,
        flags: &Overrides,
    ) -> Result<Self, CliError> {
        if let Some(file) = file {
            if let Some(declared) = file.experiment {
                if declared != kind && declared != ExperimentKind::Custom {
                    return Err(CliError::Validation(format!(
                        "manifest declares experiment `{}` but `{}` was invoked",
                        declared.name(),
                        kind.name()
                    )));
                }
            }
        }
        let defaults = SimConfig::default();
        let file_sim = file.map(|f| f.sim.clone()).unwrap_or_default();
        let sim = SimConfig {
            n_paths: flags
                .paths
                .or(file_sim.n_paths)
                .unwrap_or(defaults.n_paths),
            horizon: flags
                .horizon
                .or(file_sim.horizon)
                .unwrap_or(defaults.horizon),
            grid_points: flags
                .grid_points
                .or(file_sim.grid_points)
                .unwrap_or(defaults.grid_points),
            master_seed: flags
                .seed
                .or(file_sim.master_seed)
                .unwrap_or(defaults.master_seed),
            initial_sign: flags
                .initial_sign
                .or(file_sim.initial_sign)
                .map(InitialSign::from)
                .unwrap_or(defaults.initial_sign),
        };
        sim.validate()?;
        Ok(Self {
            sim,
            out_dir: flags
                .out
                .clone()
                .or_else(|| file.and_then(|f| f.output_dir.clone()))
                .unwrap_or_else(|| PathBuf::from("ctrw-out")),
            format: flags
                .format
                .or(file.and_then(|f| f.format))
                .unwrap_or(OutputFormat::Json),
            epsilon: flags.epsilon.or(file.and_then(|f| f.epsilon)),
            r_values: flags
                .r_values
                .clone()
                .or_else(|| file.and_then(|f| f.r_values.clone())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_overrides_beat_manifest() {
        let file: FileConfig = toml::from_str(
            r#"
            experiment = "fig2"
            epsilon = 0.03
            [sim]
            n_paths = 5000
            master_seed = 7
            "#,
        )
        .unwrap();
        let flags = Overrides {
            seed: Some(99),
            ..Default::default()
        };
        let cfg = ResolvedConfig::resolve(ExperimentKind::Fig2, Some(&file), &flags).unwrap();
        assert_eq!(cfg.sim.master_seed, 99);
        assert_eq!(cfg.sim.n_paths, 5000);
        assert_eq!(cfg.epsilon, Some(0.03));
    }

    #[test]
    fn manifest_experiment_must_match_subcommand() {
        let file: FileConfig = toml::from_str(r#"experiment = "fig1""#).unwrap();
        let err =
            ResolvedConfig::resolve(ExperimentKind::Fig3, Some(&file), &Overrides::default());
        assert!(err.is_err());
    }

    #[test]
    fn unknown_manifest_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("unknown_key = 1").is_err());
    }

    #[test]
    fn defaults_apply_without_manifest() {
        let cfg =
            ResolvedConfig::resolve(ExperimentKind::Fig1, None, &Overrides::default()).unwrap();
        assert_eq!(cfg.sim.n_paths, 100_000);
        assert_eq!(cfg.sim.master_seed, 42);
        assert_eq!(cfg.epsilon, None);
        assert_eq!(cfg.format, OutputFormat::Json);
    }
}
