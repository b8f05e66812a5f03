use std::f64::consts::PI;

use rayon::prelude::*;

use hall_core::conductance::{kubo_streda, TraceWindow};
use hall_core::spectral::spectral_projection;
use hall_core::topology::{
    connes_area_sum, connes_limit, flux_unitary, index_pair, trace_per_unit_volume_marker,
};
use hall_core::{eigendecompose, switch_pair, EnergySet, SitePoint};

use super::{check_finite, hamiltonian, RunOutput};
use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::CliError;

pub fn run_topology(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut table = Table::new(
        "topology",
        &[
            "kind",
            "label",
            "param",
            "value_re",
            "value_im",
            "reference",
            "error",
        ],
    );

    let jobs: Vec<(usize, i64)> = (0..cfg.triangles.len())
        .flat_map(|k| cfg.radii.iter().map(move |&r| (k, r)))
        .collect();
    let sums = jobs
        .par_iter()
        .map(|&(k, r)| {
            let t = cfg.triangles[k];
            let u = t.map(|(a, b)| SitePoint::site(a, b));
            let s = connes_area_sum(u[0], u[1], u[2], r)?;
            Ok::<_, CliError>((k, r, s, connes_limit(u[0], u[1], u[2])))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (k, r, s, lim) in sums {
        table.push(vec![
            "connes".into(),
            format!("triangle{k}").into(),
            Cell::I(r),
            s.into(),
            0.0.into(),
            lim.into(),
            (s - lim).abs().into(),
        ]);
    }

    if let Some(gap) = cfg.fermi_gap {
        let spec = eigendecompose(&hamiltonian(cfg, cfg.bx)?)?;
        let lam = spec.gap_midpoint(gap.0, gap.1);
        let p = spectral_projection(&spec, &EnergySet::below(lam))?;
        let (l1, l2) = switch_pair(cfg.bx);
        let w = TraceWindow::at_crossing(cfg.window);
        let w2 = TraceWindow::at_crossing(cfg.window + 2);
        let u = flux_unitary(cfg.bx, SitePoint::plaquette(-1, -1))?;
        let kubo = kubo_streda(&p, &l1, &l2, w)?;
        let idx = index_pair(&p, &u, w)?;
        let idx2 = index_pair(&p, &u, w2)?;
        let marker = trace_per_unit_volume_marker(&p, cfg.marker_inner, cfg.marker_cutoff)?;
        let n = idx.windowed.round();
        let values = [
            (
                "kubo",
                cfg.window,
                2.0 * PI * kubo.value,
                2.0 * PI * kubo.imag_residual,
            ),
            ("index", cfg.window, idx.windowed, idx.imag_residual),
            ("index", cfg.window + 2, idx2.windowed, idx2.imag_residual),
            ("marker", cfg.marker_inner, 2.0 * PI * marker, 0.0),
        ];
        let mut worst = 0.0f64;
        for (kind, param, v, im) in values {
            worst = worst.max((v - n).abs());
            table.push(vec![
                kind.into(),
                format!("fermi{lam:.6}").into(),
                Cell::I(param),
                v.into(),
                im.into(),
                n.into(),
                (v - n).abs().into(),
            ]);
        }
        table.push(vec![
            "agreement".into(),
            "max_deviation".into(),
            Cell::I(cfg.window),
            worst.into(),
            0.0.into(),
            n.into(),
            (idx.windowed - idx2.windowed).abs().into(),
        ]);
    }
    let mut alarms = Vec::new();
    check_finite(&table, &mut alarms);
    Ok(RunOutput { table, alarms })
}
