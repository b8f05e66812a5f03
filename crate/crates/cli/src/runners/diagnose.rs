use rayon::prelude::*;

use hall_core::operators::short_range_profile;
use hall_core::spectral::{
    combes_thomas_check, dynamical_localization_profile, localization_minima, propagation_check,
    CT_DEFAULT_C, CT_DEFAULT_CONSTANT,
};
use hall_core::{c64, eigendecompose};

use super::{check_finite, hamiltonian, RunOutput};
use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::CliError;

const CT_RE: [f64; 3] = [-5.0, 0.0, 2.5];
const CT_IM: [f64; 3] = [0.1, 0.5, 2.0];
const DELTAS: [f64; 3] = [0.1, 0.5, 1.0];
const TIMES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
const NUS: [f64; 3] = [0.0, 1.0, 2.0];
const LOC_TIMES: [f64; 5] = [0.0, 1.0, 2.0, 4.0, 8.0];

fn ell(x1: i64, x2: i64) -> f64 {
    (x1.abs() + x2.abs()) as f64
}

fn row(kind: &str, label: String, param: f64, value: f64, reference: f64, aux: f64) -> Vec<Cell> {
    vec![
        kind.into(),
        label.into(),
        param.into(),
        value.into(),
        reference.into(),
        aux.into(),
    ]
}

pub fn run_diagnose(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut table = Table::new(
        "diagnose",
        &["kind", "label", "param", "value", "reference", "aux"],
    );
    let mut alarms = Vec::new();
    let h = hamiltonian(cfg, cfg.bx)?;
    let bx = cfg.bx;

    let profile = short_range_profile(&h, cfg.mu);
    let cx = ((bx.x1_min + bx.x1_max) / 2, (bx.x2_min + bx.x2_max) / 2);
    let interior = profile[bx.index(cx.0, cx.1).unwrap()];
    let sup = profile.iter().copied().fold(0.0, f64::max);
    table.push(row(
        "c1",
        format!("site{}_{}", cx.0, cx.1),
        cfg.mu,
        interior,
        4.0 * cfg.mu.exp_m1(),
        sup,
    ));

    let spec = eigendecompose(&h)?;
    let zs: Vec<c64> = CT_RE
        .iter()
        .flat_map(|&r| CT_IM.iter().map(move |&i| c64::new(r, i)))
        .collect();
    let checks = [0usize, 1]
        .par_iter()
        .map(|&k| {
            if k == 0 {
                combes_thomas_check(&spec, ell, &zs, CT_DEFAULT_C, CT_DEFAULT_CONSTANT)
            } else {
                propagation_check(&h, &spec, ell, &DELTAS, &TIMES)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (name, c) in ["combes_thomas", "propagation"].into_iter().zip(checks) {
        if !c.holds() {
            alarms.push(format!(
                "{name} bound violated at {} of {} samples",
                c.violations, c.samples
            ));
        }
        table.push(row(
            name,
            "violations".into(),
            c.samples as f64,
            c.violations as f64,
            0.0,
            c.worst_ratio,
        ));
    }

    if let Some(delta) = cfg.delta {
        let minima = localization_minima(&spec, delta);
        let mut total = 0.0;
        for (k, m) in minima.iter().enumerate() {
            total += m.m;
            table.push(row(
                "m_zeta",
                format!("state{k}"),
                m.lambda,
                m.m,
                f64::NAN,
                f64::NAN,
            ));
        }
        table.push(row(
            "m_zeta_total",
            "sum".into(),
            minima.len() as f64,
            total,
            f64::NAN,
            f64::NAN,
        ));
        for (nu, b) in dynamical_localization_profile(&spec, delta, cfg.mu, &NUS, &LOC_TIMES) {
            table.push(row(
                "localization_bound",
                "sampled_sup".into(),
                nu,
                b,
                f64::NAN,
                cfg.mu,
            ));
        }
    }
    check_finite(&table, &mut alarms);
    Ok(RunOutput { table, alarms })
}
