//! One runner per command. Sweep points are evaluated on the rayon pool and
//! collected in input order, so outputs do not depend on the thread count.

mod bulk;
mod diagnose;
mod edge;
mod harper;
mod topology;

pub use bulk::run_bulk;
pub use diagnose::run_diagnose;
pub use edge::run_edge;
pub use harper::run_harper;
pub use topology::run_topology;

use hall_core::operators::{cauchy_potential, harper_hamiltonian, DisorderConfig};
use hall_core::{LatticeBox, LatticeOperator};

use crate::config::{Command, ExperimentConfig};
use crate::output::Table;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    /// Diagnostic thresholds that were breached; any entry means exit status 3.
    pub alarms: Vec<String>,
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    if let Some(c) = cfg.command {
        if c != cmd {
            return Err(CliError::Config(format!(
                "config is for '{}', not '{}'",
                c.name(),
                cmd.name()
            )));
        }
    }
    match cmd {
        Command::Bulk => run_bulk(cfg),
        Command::Edge => run_edge(cfg),
        Command::Topology => run_topology(cfg),
        Command::Harper => run_harper(cfg),
        Command::Diagnose => run_diagnose(cfg),
    }
}

/// `H_φ + V` on `bx` with the configured Cauchy disorder.
pub(crate) fn hamiltonian(
    cfg: &ExperimentConfig,
    bx: LatticeBox,
) -> Result<LatticeOperator, CliError> {
    let h = harper_hamiltonian(bx, cfg.phi());
    if cfg.alpha == 0.0 {
        return Ok(h);
    }
    let v = cauchy_potential(
        bx,
        &DisorderConfig {
            alpha: cfg.alpha,
            seed: cfg.seed,
        },
    );
    Ok(h.plus_diagonal(&v)?)
}

pub(crate) fn require<T: Copy>(v: Option<T>, key: &str, cmd: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("{cmd} needs '{key}'")))
}

pub(crate) fn check_finite(table: &Table, alarms: &mut Vec<String>) {
    use crate::output::Cell;
    let bad = table
        .rows
        .iter()
        .flatten()
        .filter(|c| matches!(c, Cell::F(x) if x.is_infinite()))
        .count();
    if bad > 0 {
        alarms.push(format!("{bad} infinite values in output"));
    }
}
