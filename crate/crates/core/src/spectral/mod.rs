//! Finite-volume functional calculus through a single Hermitian
//! eigendecomposition.

mod bounds;
mod energy_set;
mod localization;
mod smooth_step;

pub use bounds::{
    combes_thomas_check, combes_thomas_delta, propagation_check, propagation_speed, BoundCheck,
    CT_DEFAULT_C, CT_DEFAULT_CONSTANT,
};
pub use energy_set::EnergySet;
pub use localization::{
    dynamical_localization_bound, dynamical_localization_profile, localization_minima,
    localized_basis, LocalizationMinimum,
};
pub use smooth_step::{SmoothStep, StepShape};

use std::ops::Range;

use faer::{c64, Mat, MatRef};

use crate::error::{HallError, Result};
use crate::lattice::LatticeBox;
use crate::operators::LatticeOperator;

/// Ascending eigenvalues and orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub bx: LatticeBox,
    pub eigenvalues: Vec<f64>,
    pub vectors: Mat<c64>,
    /// Scale for tolerances: `max(‖H‖, 1)`.
    pub scale: f64,
}

/// A maximal run of eigenvalues closer than the degeneracy tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub range: Range<usize>,
    pub value: f64,
}

pub fn eigendecompose(h: &LatticeOperator) -> Result<Spectrum> {
    if !h.hermitian {
        return Err(HallError::NonHermitian(h.hermitian_residual()));
    }
    let evd = h
        .matrix
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| HallError::Domain(format!("eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let eigenvalues: Vec<f64> = (0..h.dim()).map(|k| s[k].re).collect();
    let vectors = evd.U().to_owned();
    let norm = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(Spectrum {
        bx: h.bx,
        eigenvalues,
        vectors,
        scale: norm.max(1.0),
    })
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn degeneracy_tol(&self) -> f64 {
        1e-8 * self.scale
    }

    pub fn tie_tol(&self) -> f64 {
        1e-9 * self.scale
    }

    pub fn clusters(&self) -> Vec<Cluster> {
        let tol = self.degeneracy_tol();
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.len() {
            if k == self.len() || self.eigenvalues[k] - self.eigenvalues[k - 1] >= tol {
                let value = self.eigenvalues[start..k].iter().sum::<f64>() / (k - start) as f64;
                out.push(Cluster {
                    range: start..k,
                    value,
                });
                start = k;
            }
        }
        out
    }

    /// Indices of eigenvalues in `s`, failing if any sits on a cut.
    pub fn select(&self, s: &EnergySet) -> Result<Vec<usize>> {
        let tol = self.tie_tol();
        for &cut in s.endpoints().iter() {
            if let Some(&e) = self.eigenvalues.iter().find(|e| (*e - cut).abs() <= tol) {
                return Err(HallError::AmbiguousCut {
                    eigenvalue: e,
                    cut,
                    tol,
                });
            }
        }
        Ok((0..self.len())
            .filter(|&k| s.contains(self.eigenvalues[k]))
            .collect())
    }

    /// Eigenvector columns `idx` as an `n × |idx|` matrix.
    pub fn columns(&self, idx: &[usize]) -> Mat<c64> {
        Mat::from_fn(self.len(), idx.len(), |i, j| self.vectors[(i, idx[j])])
    }

    /// `U† X U`.
    pub fn to_eigenbasis(&self, x: &LatticeOperator) -> Result<Mat<c64>> {
        if x.bx != self.bx {
            return Err(HallError::BoxMismatch);
        }
        Ok(self.vectors.adjoint() * (&x.matrix * &self.vectors))
    }

    /// `U Y U†`.
    pub fn from_eigenbasis(&self, y: MatRef<'_, c64>) -> LatticeOperator {
        LatticeOperator {
            bx: self.bx,
            matrix: &self.vectors * (y * self.vectors.adjoint()),
            hermitian: false,
        }
    }

    /// Midpoint of the widest gap between consecutive eigenvalues in `(lo, hi)`,
    /// or the interval midpoint when no eigenvalue lies inside.
    pub fn gap_midpoint(&self, lo: f64, hi: f64) -> f64 {
        let mut pts = vec![lo];
        pts.extend(
            self.eigenvalues
                .iter()
                .copied()
                .filter(|&e| e > lo && e < hi),
        );
        pts.push(hi);
        let mut best = (0.0, (lo + hi) / 2.0);
        for w in pts.windows(2) {
            if w[1] - w[0] > best.0 {
                best = (w[1] - w[0], (w[0] + w[1]) / 2.0);
            }
        }
        best.1
    }
}

/// `U 1_S(Λ) U†`.
pub fn spectral_projection(spec: &Spectrum, s: &EnergySet) -> Result<LatticeOperator> {
    let idx = spec.select(s)?;
    Ok(projection_from_indices(spec, &idx))
}

pub(crate) fn projection_from_indices(spec: &Spectrum, idx: &[usize]) -> LatticeOperator {
    let v = spec.columns(idx);
    LatticeOperator {
        bx: spec.bx,
        matrix: &v * v.adjoint(),
        hermitian: true,
    }
}

/// `U g(Λ) U†`.
pub fn apply_function<G: Fn(f64) -> c64>(spec: &Spectrum, g: G) -> LatticeOperator {
    let gv: Vec<c64> = spec.eigenvalues.iter().map(|&l| g(l)).collect();
    let n = spec.len();
    let scaled = Mat::from_fn(n, n, |i, j| spec.vectors[(i, j)] * gv[j]);
    LatticeOperator {
        bx: spec.bx,
        matrix: &scaled * spec.vectors.adjoint(),
        hermitian: gv.iter().all(|v| v.im == 0.0),
    }
}

/// `e^{iHt} X e^{−iHt}`.
pub fn evolve(spec: &Spectrum, x: &LatticeOperator, t: f64) -> Result<LatticeOperator> {
    let mut y = spec.to_eigenbasis(x)?;
    let l = &spec.eigenvalues;
    for j in 0..spec.len() {
        for i in 0..spec.len() {
            y[(i, j)] *= c64::cis((l[i] - l[j]) * t);
        }
    }
    let mut out = spec.from_eigenbasis(y.as_ref());
    out.hermitian = x.hermitian;
    Ok(out)
}

/// `(e^{iωT} − 1)/(iωT)`, equal to 1 when `|ω| < tol`.
pub fn time_average_kernel(omega: f64, t_max: f64, tol: f64) -> c64 {
    if omega.abs() < tol {
        return c64::new(1.0, 0.0);
    }
    let x = omega * t_max;
    let h = (x / 2.0).sin();
    // (cos x − 1 + i sin x) / (i x)
    c64::new(x.sin() / x, 2.0 * h * h / x)
}

/// `(1/T) ∫₀ᵀ e^{iHt} X e^{−iHt} dt` in closed form.
pub fn time_average(spec: &Spectrum, x: &LatticeOperator, t_max: f64) -> Result<LatticeOperator> {
    if !(t_max > 0.0) {
        return Err(HallError::Domain(format!(
            "averaging time must be positive, got {t_max}"
        )));
    }
    let mut y = spec.to_eigenbasis(x)?;
    let l = &spec.eigenvalues;
    let tol = spec.degeneracy_tol();
    for j in 0..spec.len() {
        for i in 0..spec.len() {
            y[(i, j)] *= time_average_kernel(l[i] - l[j], t_max, tol);
        }
    }
    let mut out = spec.from_eigenbasis(y.as_ref());
    out.hermitian = x.hermitian;
    Ok(out)
}

pub(crate) fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut r = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            r = r.max(m[(i, j)].norm());
        }
    }
    r
}
