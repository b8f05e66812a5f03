use faer::{c64, Mat};

use crate::error::{HallError, Result};
use crate::lattice::{lipschitz_weight, LatticeBox};
use crate::operators::{holmgren, LatticeOperator};
use crate::spectral::Spectrum;

/// Default `c` in `δ = c·|Im z|/(1 + |Im z|)`.
pub const CT_DEFAULT_C: f64 = 0.1;
/// Default `C` in `‖e^{δℓ} R(z) e^{−δℓ}‖ ≤ C/|Im z|`.
pub const CT_DEFAULT_CONSTANT: f64 = 2.0;

/// Outcome of checking a norm bound over a set of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub samples: usize,
    pub violations: usize,
    /// Largest observed `norm / bound`.
    pub worst_ratio: f64,
}

impl BoundCheck {
    fn new() -> Self {
        Self {
            samples: 0,
            violations: 0,
            worst_ratio: 0.0,
        }
    }

    fn record(&mut self, norm: f64, bound: f64) {
        let r = norm / bound;
        self.samples += 1;
        if r > 1.0 + 1e-10 {
            self.violations += 1;
        }
        self.worst_ratio = self.worst_ratio.max(r);
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub fn combes_thomas_delta(c: f64, z: c64) -> f64 {
    let y = z.im.abs();
    c * y / (1.0 + y)
}

fn spectral_norm(m: &Mat<c64>) -> Result<f64> {
    let sv = m
        .singular_values()
        .map_err(|e| HallError::Domain(format!("svd failed: {e:?}")))?;
    Ok(sv.into_iter().fold(0.0, f64::max))
}

fn weights<F: Fn(i64, i64) -> f64>(bx: LatticeBox, ell: &F, delta: f64) -> Result<Vec<f64>> {
    Ok(lipschitz_weight(bx, ell, delta)?
        .values
        .iter()
        .map(|v| v.re)
        .collect())
}

/// Checks `‖e^{δℓ} (H − z)^{−1} e^{−δℓ}‖ ≤ C/|Im z|` with `δ = c|Im z|/(1+|Im z|)`.
pub fn combes_thomas_check<F: Fn(i64, i64) -> f64>(
    spec: &Spectrum,
    ell: F,
    zs: &[c64],
    c: f64,
    big_c: f64,
) -> Result<BoundCheck> {
    let n = spec.len();
    let mut out = BoundCheck::new();
    for &z in zs {
        if z.im == 0.0 {
            return Err(HallError::Domain(format!("z = {z} lies on the real axis")));
        }
        let delta = combes_thomas_delta(c, z);
        let w = weights(spec.bx, &ell, delta)?;
        let inv: Vec<c64> = spec
            .eigenvalues
            .iter()
            .map(|&l| (c64::new(l, 0.0) - z).inv())
            .collect();
        let left = Mat::from_fn(n, n, |i, j| spec.vectors[(i, j)] * inv[j] * w[i]);
        let right = Mat::from_fn(n, n, |i, j| spec.vectors[(j, i)].conj() / w[j]);
        let a = &left * &right;
        out.record(spectral_norm(&a)?, big_c / z.im.abs());
    }
    Ok(out)
}

/// `‖B‖/2` with `iB(x,x') = H(x,x')(e^{δ(ℓ(x')−ℓ(x))} − e^{δ(ℓ(x)−ℓ(x'))})`,
/// the norm bounded by the larger of the maximal row and column sums.
pub fn propagation_speed<F: Fn(i64, i64) -> f64>(
    h: &LatticeOperator,
    ell: &F,
    delta: f64,
) -> Result<f64> {
    let bx = h.bx;
    let l: Vec<f64> = bx.sites().map(|(a, b)| ell(a, b)).collect();
    lipschitz_weight(bx, ell, delta)?;
    let n = h.dim();
    let b = Mat::from_fn(n, n, |i, j| {
        let d = delta * (l[j] - l[i]);
        // B = −i H (e^{d} − e^{−d})
        h.matrix[(i, j)] * c64::new(0.0, -2.0 * d.sinh())
    });
    Ok(holmgren(&b) / 2.0)
}

/// Checks `‖e^{δℓ} e^{iHt} e^{−δℓ}‖ ≤ e^{C|t|}` with `C` from [`propagation_speed`].
pub fn propagation_check<F: Fn(i64, i64) -> f64>(
    h: &LatticeOperator,
    spec: &Spectrum,
    ell: F,
    deltas: &[f64],
    ts: &[f64],
) -> Result<BoundCheck> {
    if h.bx != spec.bx {
        return Err(HallError::BoxMismatch);
    }
    let n = spec.len();
    let mut out = BoundCheck::new();
    for &delta in deltas {
        let c = propagation_speed(h, &ell, delta)?;
        let w = weights(spec.bx, &ell, delta)?;
        let right = Mat::from_fn(n, n, |i, j| spec.vectors[(j, i)].conj() / w[j]);
        for &t in ts {
            let left = Mat::from_fn(n, n, |i, j| {
                spec.vectors[(i, j)] * c64::cis(spec.eigenvalues[j] * t) * w[i]
            });
            let a = &left * &right;
            out.record(spectral_norm(&a)?, (c * t.abs()).exp());
        }
    }
    Ok(out)
}
