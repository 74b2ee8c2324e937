//! Library half of the `ctrw` binary: experiment runners, config
//! resolution, and deterministic file output. Kept as a library so the
//! experiment logic is testable without spawning the binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod parallel;

pub use config::{OutputFormat, ResolvedConfig};
pub use error::CliError;
