use std::f64::consts::PI;

use faer::{c64, Mat};
use rayon::prelude::*;

use super::resolvent::t_phi_trace;
use crate::error::{HallError, Result};
use crate::lattice::{switch_pair, LatticeBox};
use crate::operators::{commutator_switch, harper_hamiltonian, LatticeOperator};
use crate::quadrature::QuadratureRule;
use crate::spectral::SmoothStep;

/// `‖H_φ‖ ≤ 4`; energies beyond this are off the spectrum for every flux.
pub const HARPER_NORM_BOUND: f64 = 4.0;

fn check_energy(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda.abs() <= HARPER_NORM_BOUND {
        return Err(HallError::Domain(format!(
            "energy {lambda} is not outside [-{HARPER_NORM_BOUND}, {HARPER_NORM_BOUND}]"
        )));
    }
    Ok(())
}

/// Disorder-averaged edge current density at energy `lambda` for Cauchy
/// strength `alpha`. `quad` must live on `[0, |alpha|]`; the `−η` half of the
/// line integral is folded in by conjugation.
pub fn j_b(
    phi: f64,
    alpha: f64,
    lambda: f64,
    quad: &QuadratureRule,
    bx: LatticeBox,
) -> Result<f64> {
    check_energy(lambda)?;
    let a = alpha.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    let scale = a.max(1.0);
    if quad.lo.abs() > 1e-12 * scale || (quad.hi - a).abs() > 1e-12 * scale {
        return Err(HallError::Config(format!(
            "quadrature on [{}, {}] but expected [0, {a}]",
            quad.lo, quad.hi
        )));
    }
    let mut acc = 0.0;
    for (&eta, &w) in quad.nodes.iter().zip(&quad.weights) {
        let up = t_phi_trace(phi, c64::new(lambda, eta), bx)?.value;
        let down = t_phi_trace(phi, c64::new(lambda, -eta), bx)?.value;
        acc += w * (c64::new(0.0, 1.0) * (up - down.conj())).re;
    }
    Ok(acc / (2.0 * PI))
}

/// `c_N`, the coefficient of `λ^{−(N+3)}` in `tr T(λ+iη) − conj tr T(λ−iη)`:
/// `c_N = −Σ_n (2n−N) tr A^n C1 A^{N−n} C2` with `A = H − iη`.
pub fn neumann_term_on(
    h: &LatticeOperator,
    c1: &LatticeOperator,
    c2: &LatticeOperator,
    order: usize,
    eta: f64,
) -> c64 {
    let n = h.dim();
    let shift = c64::new(0.0, eta);
    let a = Mat::from_fn(n, n, |i, j| {
        h.matrix[(i, j)] - if i == j { shift } else { c64::new(0.0, 0.0) }
    });
    let mut powers = vec![Mat::<c64>::identity(n, n)];
    for k in 1..=order {
        powers.push(&powers[k - 1] * &a);
    }
    let mut s = c64::new(0.0, 0.0);
    for k in 0..=order {
        let weight = 2.0 * k as f64 - order as f64;
        if weight == 0.0 {
            continue;
        }
        let m = &powers[k] * (&c1.matrix * (&powers[order - k] * &c2.matrix));
        let tr: c64 = (0..n).map(|i| m[(i, i)]).sum();
        s += tr * weight;
    }
    -s
}

/// [`neumann_term_on`] for the Harper model. `bx` must extend `order + 2`
/// sites past the switch crossing so no boundary enters the trace.
pub fn neumann_term(phi: f64, order: usize, eta: f64, bx: LatticeBox) -> Result<c64> {
    if order > 2 {
        return Err(HallError::Config(format!(
            "order {order} > 2 is not supported"
        )));
    }
    let pad = order as i64 + 2;
    let need = LatticeBox::new((-1 - pad, pad), (-1 - pad, pad))?;
    if !bx.contains_box(&need) {
        return Err(HallError::Padding(format!(
            "{bx:?} does not contain {need:?}"
        )));
    }
    let h = harper_hamiltonian(bx, phi);
    let (l1, l2) = switch_pair(bx);
    let c1 = commutator_switch(&h, &l1)?;
    let c2 = commutator_switch(&h, &l2)?;
    Ok(neumann_term_on(&h, &c1, &c2, order, eta))
}

/// Closed-form leading behaviour `−(4|α|/π) sinφ (cosφ+1) λ^{−5}`.
pub fn leading_asymptotic(phi: f64, alpha: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(HallError::Domain(format!("energy {lambda}")));
    }
    Ok(-(4.0 * alpha.abs() / PI) * phi.sin() * (phi.cos() + 1.0) * lambda.powi(-5))
}

/// Leading term rebuilt from the second-order coefficient:
/// `−(|α|/2π) Im c_2 λ^{−5}`.
pub fn neumann_leading_asymptotic(
    phi: f64,
    alpha: f64,
    lambda: f64,
    bx: LatticeBox,
) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(HallError::Domain(format!("energy {lambda}")));
    }
    let c2 = neumann_term(phi, 2, 0.0, bx)?;
    Ok(-(alpha.abs() / (2.0 * PI)) * c2.im * lambda.powi(-5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JbIntegral {
    /// `−∫ ρ'(λ) j_B(λ) dλ`.
    pub value: f64,
    /// Same integral with `j_B` replaced by [`leading_asymptotic`].
    pub leading: f64,
    pub lambda_nodes: usize,
    pub eta_nodes: usize,
}

/// `E σ_E = −∫ρ'(λ) j_B(λ) dλ` for a step whose transition sits outside the
/// Harper spectrum.
pub fn expected_jb_integral(
    rho: &SmoothStep,
    phi: f64,
    alpha: f64,
    lambda_nodes: usize,
    eta_nodes: usize,
    bx: LatticeBox,
) -> Result<JbIntegral> {
    let (lo, hi) = rho.support();
    if !(lo > HARPER_NORM_BOUND || hi < -HARPER_NORM_BOUND) {
        return Err(HallError::Domain(format!(
            "step support [{lo}, {hi}] meets [-{HARPER_NORM_BOUND}, {HARPER_NORM_BOUND}]"
        )));
    }
    let lq = QuadratureRule::gauss_legendre(lambda_nodes, lo, hi)?;
    let eq = QuadratureRule::gauss_legendre(eta_nodes, 0.0, alpha.abs())?;
    let terms: Vec<Result<(f64, f64)>> = lq
        .nodes
        .par_iter()
        .zip(lq.weights.par_iter())
        .map(|(&l, &w)| {
            let d = rho.rho_prime(l);
            Ok((
                -w * d * j_b(phi, alpha, l, &eq, bx)?,
                -w * d * leading_asymptotic(phi, alpha, l)?,
            ))
        })
        .collect();
    let (mut value, mut leading) = (0.0, 0.0);
    for t in terms {
        let (v, l) = t?;
        value += v;
        leading += l;
    }
    Ok(JbIntegral {
        value,
        leading,
        lambda_nodes,
        eta_nodes,
    })
}
