use std::f64::consts::PI;

use rayon::prelude::*;

use hall_core::harper::{
    disorder_average_trace, j_b, leading_asymptotic, neumann_term, t_phi_trace,
};
use hall_core::operators::harper_hamiltonian;
use hall_core::{c64, LatticeBox, QuadratureRule};

use super::{check_finite, RunOutput};
use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::CliError;

/// Relative change between `n` and `2n` quadrature nodes above which a row alarms.
const NODE_DOUBLING_ALARM: f64 = 1e-4;
const Z_SCORE_ALARM: f64 = 3.0;

fn row(
    kind: &str,
    label: String,
    param: f64,
    value: c64,
    reference: c64,
    aux: f64,
    score: f64,
) -> Vec<Cell> {
    vec![
        kind.into(),
        label.into(),
        param.into(),
        value.re.into(),
        value.im.into(),
        reference.re.into(),
        reference.im.into(),
        aux.into(),
        score.into(),
    ]
}

pub fn run_harper(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut table = Table::new(
        "harper",
        &[
            "kind",
            "label",
            "param",
            "value_re",
            "value_im",
            "reference_re",
            "reference_im",
            "aux",
            "score",
        ],
    );
    let mut alarms = Vec::new();
    let phi = cfg.phi();
    let flux = cfg.flux.to_string();
    let pad = LatticeBox::new((-6, 5), (-6, 5))?;

    if !cfg.lambda_grid.is_empty() {
        let q = QuadratureRule::gauss_legendre(cfg.quad_nodes, 0.0, cfg.alpha)?;
        let q2 = QuadratureRule::gauss_legendre(2 * cfg.quad_nodes, 0.0, cfg.alpha)?;
        let c2 = neumann_term(phi, 2, 0.0, pad)?;
        let from_c2 = -(cfg.alpha / (2.0 * PI)) * c2.im;
        let vals = cfg
            .lambda_grid
            .par_iter()
            .map(|&l| {
                let v = j_b(phi, cfg.alpha, l, &q, cfg.bx)?;
                let v2 = j_b(phi, cfg.alpha, l, &q2, cfg.bx)?;
                Ok::<_, CliError>((l, v, v2, leading_asymptotic(phi, cfg.alpha, l)?))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (l, v, v2, lead) in vals {
            let doubling = (v2 - v).abs();
            if doubling > NODE_DOUBLING_ALARM * v.abs().max(1e-300) {
                alarms.push(format!(
                    "quadrature not converged at lambda {l}: |Δ| = {doubling:e}"
                ));
            }
            let c = |x: f64| c64::new(x, 0.0);
            table.push(row(
                "jb",
                flux.clone(),
                l,
                c(v),
                c(lead),
                doubling,
                v / lead,
            ));
            let scaled = v * l.powi(5);
            table.push(row(
                "jb_scaled",
                flux.clone(),
                l,
                c(scaled),
                c(from_c2),
                doubling,
                scaled / from_c2,
            ));
        }
    }

    for f in &cfg.neumann_flux {
        let ph = f.phi();
        let h = harper_hamiltonian(pad, ph);
        let h2 = h.matmul(&h)?;
        let one = c64::new(1.0, 0.0);
        let elems = [
            ("h2_m1m1_00", (-1, -1), (0, 0), one + c64::cis(-ph)),
            ("h2_0m1_m10", (0, -1), (-1, 0), one + c64::cis(ph)),
        ];
        for (name, x, y, expect) in elems {
            let v = h2.get(x, y).expect("sites inside the padded box");
            table.push(row(
                name,
                f.to_string(),
                2.0,
                v,
                expect,
                0.0,
                (v - expect).norm(),
            ));
        }
        for order in 0..=2usize {
            let v = neumann_term(ph, order, 0.0, pad)?;
            let expect = if order == 2 {
                c64::new(0.0, 8.0 * ph.sin() * (ph.cos() + 1.0))
            } else {
                c64::new(0.0, 0.0)
            };
            table.push(row(
                "neumann",
                f.to_string(),
                order as f64,
                v,
                expect,
                0.0,
                (v - expect).norm(),
            ));
        }
    }

    if cfg.samples > 0 {
        let z = cfg
            .z
            .ok_or_else(|| CliError::Config("Monte Carlo needs 'z'".into()))?;
        let bx = cfg.mc_box.unwrap_or(LatticeBox::centered(10)?);
        let est = disorder_average_trace(phi, cfg.alpha, z, cfg.samples, cfg.seed, bx)?;
        let shifted = z + c64::new(0.0, cfg.alpha * z.im.signum());
        let oracle = t_phi_trace(phi, shifted, bx)?.value;
        let score = (est.mean - oracle).norm() / est.stderr;
        if score > Z_SCORE_ALARM {
            alarms.push(format!(
                "Monte Carlo mean is {score:.2} standard errors from the shifted trace"
            ));
        }
        table.push(row(
            "monte_carlo",
            flux.clone(),
            cfg.samples as f64,
            est.mean,
            oracle,
            est.stderr,
            score,
        ));
    }
    check_finite(&table, &mut alarms);
    Ok(RunOutput { table, alarms })
}
