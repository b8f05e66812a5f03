use rayon::prelude::*;

use hall_core::conductance::{
    bound_state_correction, edge_conductance_gap, instantaneous_identity_check, kubo_streda,
    sigma_e1, sigma_e2, windowed_edge_current, BoundaryFilter, SwitchedSystem, TraceWindow,
};
use hall_core::operators::{restrict_half_plane, EdgeGeometry};
use hall_core::spectral::spectral_projection;
use hall_core::{EnergySet, SmoothStep};

use super::{check_finite, hamiltonian, require, RunOutput};
use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::CliError;

const NAN: f64 = f64::NAN;

pub fn run_edge(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut table = Table::new(
        "edge",
        &[
            "a",
            "kind",
            "param",
            "value",
            "sigma_b",
            "bound_state_correction",
            "identity_lhs",
            "identity_rhs",
            "identity_gap",
        ],
    );
    let delta = require(cfg.delta, "delta", "edge")?;
    if cfg.edge_depths.is_empty() {
        return Err(CliError::Config("edge needs 'edge_depths'".into()));
    }
    let rho = SmoothStep::new(delta.0, delta.1, cfg.rho_shape)?;
    let window = TraceWindow::at_crossing(cfg.window);
    window.sites(&cfg.bx)?;
    let geoms = cfg
        .edge_depths
        .iter()
        .map(|&a| EdgeGeometry::within(a, &cfg.bx))
        .collect::<Result<Vec<_>, _>>()?;

    let h_b = hamiltonian(cfg, cfg.bx)?;
    let bulk = SwitchedSystem::new(h_b.clone())?;
    let lam0 = bulk.spec.gap_midpoint(delta.0, delta.1);
    let p = spectral_projection(&bulk.spec, &EnergySet::below(lam0))?;
    let sigma_b = kubo_streda(&p, &bulk.l1, &bulk.l2, window)?.value;
    let filter = BoundaryFilter::default();
    let corrections = cfg
        .times
        .par_iter()
        .map(|&t| bound_state_correction(&bulk, &rho, t, filter).map(|c| c.value))
        .collect::<Result<Vec<_>, _>>()?;

    for geom in &geoms {
        let (h_a, _) = restrict_half_plane(&h_b, geom)?;
        let edge = SwitchedSystem::new(h_a)?;
        let a = Cell::I(geom.a);
        let gap = edge_conductance_gap(&edge, &rho, cfg.row_cut)?;
        table.push(vec![
            a.clone(),
            "edge_gap".into(),
            NAN.into(),
            gap.value.into(),
            sigma_b.into(),
            NAN.into(),
            NAN.into(),
            NAN.into(),
            NAN.into(),
        ]);
        let e1 = sigma_e1(&edge, &bulk, &rho, filter)?;
        table.push(vec![
            a.clone(),
            "sigma_e1".into(),
            0.0.into(),
            e1.value.into(),
            sigma_b.into(),
            e1.component("bound_state_sum").map(|v| -v).into(),
            NAN.into(),
            NAN.into(),
            NAN.into(),
        ]);
        let currents: Vec<_> = cfg
            .times
            .par_iter()
            .map(|&t| {
                let cur = windowed_edge_current(&edge, &rho, t);
                let id = instantaneous_identity_check(&edge, &bulk, &rho, sigma_b, t, filter)?;
                Ok::<_, CliError>((t, cur.value, id))
            })
            .collect::<Result<_, _>>()?;
        for ((t, cur, id), corr) in currents.into_iter().zip(&corrections) {
            table.push(vec![
                a.clone(),
                "current".into(),
                t.into(),
                cur.into(),
                sigma_b.into(),
                (*corr).into(),
                id.lhs.into(),
                id.rhs.into(),
                id.gap.into(),
            ]);
        }
        let averaged = cfg
            .averaging_times
            .par_iter()
            .map(|&tt| sigma_e2(&edge, &rho, tt).map(|r| (tt, r.value)))
            .collect::<Result<Vec<_>, _>>()?;
        for (tt, v) in averaged {
            table.push(vec![
                a.clone(),
                "sigma_e2".into(),
                tt.into(),
                v.into(),
                sigma_b.into(),
                NAN.into(),
                NAN.into(),
                NAN.into(),
                NAN.into(),
            ]);
        }
    }
    let mut alarms = Vec::new();
    check_finite(&table, &mut alarms);
    Ok(RunOutput { table, alarms })
}
