use rayon::prelude::*;

use hall_core::conductance::{kubo_streda, sigma_b_decomposition, TraceWindow};
use hall_core::spectral::spectral_projection;
use hall_core::{eigendecompose, switch_pair, EnergySet, HallError};

use super::{check_finite, hamiltonian, RunOutput};
use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::CliError;

const RESIDUAL_ALARM: f64 = 1e-8;

pub fn run_bulk(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut table = Table::new(
        "bulk",
        &[
            "lambda",
            "status",
            "sigma_b",
            "imag_residual",
            "full_trace_residual",
            "window_sensitivity",
            "term_minus",
            "term_plus",
            "term_delta",
            "level_sum",
        ],
    );
    let window = TraceWindow::at_crossing(cfg.window);
    window.sites(&cfg.bx)?;
    if cfg.lambda_grid.is_empty() {
        return Ok(RunOutput {
            table,
            alarms: Vec::new(),
        });
    }
    let spec = eigendecompose(&hamiltonian(cfg, cfg.bx)?)?;
    let (l1, l2) = switch_pair(cfg.bx);
    let rows: Vec<Result<Vec<Cell>, CliError>> = cfg
        .lambda_grid
        .par_iter()
        .map(|&lam| {
            let p = match spectral_projection(&spec, &EnergySet::below(lam)) {
                Ok(p) => p,
                Err(HallError::AmbiguousCut { .. }) => {
                    let mut r = vec![Cell::F(lam), Cell::from("ambiguous_cut")];
                    r.extend((0..8).map(|_| Cell::F(f64::NAN)));
                    return Ok(r);
                }
                Err(e) => return Err(e.into()),
            };
            let k = kubo_streda(&p, &l1, &l2, window)?;
            let dec = match cfg.delta {
                Some(d) if d.0 < lam && lam < d.1 => {
                    Some(sigma_b_decomposition(&spec, d, lam, &l1, &l2, window)?)
                }
                _ => None,
            };
            Ok(vec![
                Cell::F(lam),
                Cell::from("ok"),
                Cell::F(k.value),
                Cell::F(k.imag_residual),
                k.full_trace_residual.into(),
                k.window_sensitivity.into(),
                dec.as_ref().map(|d| d.term_minus).into(),
                dec.as_ref().map(|d| d.term_plus).into(),
                dec.as_ref().map(|d| d.term_delta).into(),
                dec.as_ref().map(|d| d.level_sum()).into(),
            ])
        })
        .collect();
    for r in rows {
        table.push(r?);
    }
    let mut alarms = Vec::new();
    for (r, lam) in table.rows.iter().zip(&cfg.lambda_grid) {
        if let Cell::F(res) = r[4] {
            if res > RESIDUAL_ALARM {
                alarms.push(format!("full-box trace {res:e} at lambda {lam}"));
            }
        }
    }
    check_finite(&table, &mut alarms);
    Ok(RunOutput { table, alarms })
}
