//! Batch runner for lattice Hall conductance experiments.
//!
//! Each command reads an [`ExperimentConfig`], evaluates one family of
//! quantities and writes `<name>.csv` plus `<name>.manifest.json`.

pub mod config;
pub mod output;
pub mod runners;

pub use config::{Command, ExperimentConfig, Flux};
pub use output::{write_outputs, Cell, Table};
pub use runners::{run, RunOutput};

use hall_core::HallError;

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status for unreadable or invalid configuration.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status when a diagnostic threshold was breached or a computation failed.
pub const EXIT_ALARM: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("numerical: {0}")]
    Numerical(HallError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<HallError> for CliError {
    fn from(e: HallError) -> Self {
        match e {
            HallError::Config(_)
            | HallError::Window(_)
            | HallError::Padding(_)
            | HallError::Domain(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_ALARM,
            CliError::Io(_) => 1,
        }
    }
}
