use faer::{c64, Mat};

use crate::error::{HallError, Result};
use crate::lattice::switch_pair;
use crate::spectral::Spectrum;

const MAX_PROJECTION_SAMPLES: usize = 8;

fn weighted_kernel_sum(spec: &Spectrum, idx: &[usize], g: &[c64], mu: f64, nu: f64) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let v = spec.columns(idx);
    let n = spec.len();
    let scaled = Mat::from_fn(n, idx.len(), |i, j| v[(i, j)] * g[j]);
    let m = &scaled * v.adjoint();
    let bx = spec.bx;
    let mut total = 0.0;
    for i in 0..n {
        let (x1, x2) = bx.site(i);
        let w = (1.0 + (x1.abs() + x2.abs()) as f64).powf(-nu);
        let mut row = 0.0;
        for j in 0..n {
            let (y1, y2) = bx.site(j);
            row += m[(i, j)].norm() * (mu * ((x1 - y1).abs() + (x2 - y2).abs()) as f64).exp();
        }
        total += w * row;
    }
    total
}

/// Sampled estimate of `sup_g Σ_{x,x'} |g(H)(x,x')| (1+|x|)^{−ν} e^{μ|x−x'|}`
/// over `g = e^{−itλ}1_Δ` for the given times and over `g = 1_{(Δ_lo, λ)}`
/// at up to eight gap midpoints `λ` inside Δ.
pub fn dynamical_localization_bound(
    spec: &Spectrum,
    delta: (f64, f64),
    mu: f64,
    nu: f64,
    t_samples: &[f64],
) -> f64 {
    let idx: Vec<usize> = (0..spec.len())
        .filter(|&k| spec.eigenvalues[k] > delta.0 && spec.eigenvalues[k] < delta.1)
        .collect();
    if idx.is_empty() {
        return 0.0;
    }
    let lam: Vec<f64> = idx.iter().map(|&k| spec.eigenvalues[k]).collect();
    let mut best = 0.0f64;
    for &t in t_samples {
        let g: Vec<c64> = lam.iter().map(|&l| c64::cis(-t * l)).collect();
        best = best.max(weighted_kernel_sum(spec, &idx, &g, mu, nu));
    }
    let cuts: Vec<f64> = lam.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    let stride = cuts.len().div_ceil(MAX_PROJECTION_SAMPLES).max(1);
    for &cut in cuts.iter().step_by(stride) {
        let g: Vec<c64> = lam
            .iter()
            .map(|&l| c64::new(if l < cut { 1.0 } else { 0.0 }, 0.0))
            .collect();
        best = best.max(weighted_kernel_sum(spec, &idx, &g, mu, nu));
    }
    best
}

/// The bound for each `ν` in `nus`.
pub fn dynamical_localization_profile(
    spec: &Spectrum,
    delta: (f64, f64),
    mu: f64,
    nus: &[f64],
    t_samples: &[f64],
) -> Vec<(f64, f64)> {
    nus.iter()
        .map(|&nu| {
            (
                nu,
                dynamical_localization_bound(spec, delta, mu, nu, t_samples),
            )
        })
        .collect()
}

/// Orthonormal basis of the eigenspace at `lambda`, built by repeatedly taking
/// the column of the projection at its largest diagonal entry and deflating.
pub fn localized_basis(spec: &Spectrum, lambda: f64, degeneracy_tol: f64) -> Result<Mat<c64>> {
    let idx: Vec<usize> = (0..spec.len())
        .filter(|&k| (spec.eigenvalues[k] - lambda).abs() <= degeneracy_tol)
        .collect();
    if idx.is_empty() {
        return Err(HallError::EmptyCluster(lambda));
    }
    let v = spec.columns(&idx);
    let (n, m) = (v.nrows(), v.ncols());
    // E = V C V†, with C deflated in coefficient space
    let mut c = Mat::<c64>::identity(m, m);
    let mut out = Mat::<c64>::zeros(n, m);
    for step in 0..m {
        let mut best = (0usize, -1.0f64);
        for x in 0..n {
            let row = v.row(x);
            let d = (row * &c * row.adjoint()).re;
            if d > best.1 {
                best = (x, d);
            }
        }
        let (x0, d0) = best;
        if d0 <= 1e-12 {
            return Err(HallError::Contract(format!(
                "eigenspace at {lambda} exhausted after {step} of {m} vectors"
            )));
        }
        let cv: Mat<c64> = &c * v.row(x0).adjoint().as_mat();
        let scale = 1.0 / d0.sqrt();
        let psi = &v * &cv;
        for i in 0..n {
            out[(i, step)] = psi[(i, 0)] * scale;
        }
        c = &c - (&cv * cv.adjoint()) * faer::Scale(c64::new(1.0 / d0, 0.0));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationMinimum {
    pub lambda: f64,
    pub m: f64,
}

/// `M_ζ = min(‖Λ1ψ‖, ‖(1−Λ1)ψ‖, ‖Λ2ψ‖, ‖(1−Λ2)ψ‖)` for every localized basis
/// vector with eigenvalue in `delta`.
pub fn localization_minima(spec: &Spectrum, delta: (f64, f64)) -> Vec<LocalizationMinimum> {
    let (l1, l2) = switch_pair(spec.bx);
    let mut out = Vec::new();
    for cl in spec.clusters() {
        if !(cl.value > delta.0 && cl.value < delta.1) {
            continue;
        }
        let basis = match localized_basis(spec, cl.value, spec.degeneracy_tol()) {
            Ok(b) => b,
            Err(_) => continue,
        };
        for k in 0..basis.ncols() {
            let mut w = [0.0f64; 4];
            for i in 0..basis.nrows() {
                let p = basis[(i, k)].norm_sqr();
                let (a, b) = (l1.values[i].re, l2.values[i].re);
                w[0] += a * p;
                w[1] += (1.0 - a) * p;
                w[2] += b * p;
                w[3] += (1.0 - b) * p;
            }
            let m = w
                .iter()
                .fold(f64::INFINITY, |m, v| m.min(v.max(0.0).sqrt()));
            out.push(LocalizationMinimum {
                lambda: cl.value,
                m,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_box;
    use crate::operators::{cauchy_potential, harper_hamiltonian, DisorderConfig, LatticeOperator};
    use crate::spectral::{eigendecompose, max_abs, projection_from_indices};
    use std::f64::consts::PI;

    fn spec_for(r: i64, phi: f64, alpha: f64, seed: u64) -> Spectrum {
        let b = make_box((-r, r), (-r, r)).unwrap();
        let v = cauchy_potential(b, &DisorderConfig { alpha, seed });
        eigendecompose(&harper_hamiltonian(b, phi).plus_diagonal(&v).unwrap()).unwrap()
    }

    #[test]
    fn basis_nondegenerate() {
        let s = spec_for(3, 0.9, 1.0, 3);
        let k = 17;
        let b = localized_basis(&s, s.eigenvalues[k], s.degeneracy_tol()).unwrap();
        assert_eq!(b.ncols(), 1);
        let overlap: c64 = (0..s.len())
            .map(|i| b[(i, 0)].conj() * s.vectors[(i, k)])
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
        assert!(localized_basis(&s, 100.0, 1e-8).is_err());
    }

    #[test]
    fn basis_degenerate() {
        // clean φ=0 square has symmetry degeneracies
        let b = make_box((-3, 3), (-3, 3)).unwrap();
        let s = eigendecompose(&harper_hamiltonian(b, 0.0)).unwrap();
        let cl = s
            .clusters()
            .into_iter()
            .find(|c| c.range.len() > 1)
            .expect("degenerate level");
        let basis = localized_basis(&s, cl.value, s.degeneracy_tol()).unwrap();
        assert_eq!(basis.ncols(), cl.range.len());
        let g = basis.adjoint() * &basis;
        let m = basis.ncols();
        assert!(max_abs((&g - Mat::<c64>::identity(m, m)).as_ref()) < 1e-10);
        let idx: Vec<usize> = cl.range.clone().collect();
        let e = projection_from_indices(&s, &idx);
        let rebuilt = &basis * basis.adjoint();
        assert!(max_abs((&rebuilt - &e.matrix).as_ref()) < 1e-9);
    }

    #[test]
    fn minima_bounds() {
        let s = spec_for(4, 2.0 * PI / 3.0, 3.0, 9);
        let mins = localization_minima(&s, (-1.0, 1.0));
        assert!(!mins.is_empty());
        for m in &mins {
            assert!(m.m >= 0.0 && m.m <= 1.0 / 2f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn quadrant_state_has_zero_minimum() {
        // a single site in the third quadrant decoupled from the rest
        let b = make_box((-2, 1), (-2, 1)).unwrap();
        let mut h = LatticeOperator::zeros(b);
        let k = b.index(-2, -2).unwrap();
        h.matrix[(k, k)] = c64::new(5.0, 0.0);
        let s = eigendecompose(&h).unwrap();
        let mins = localization_minima(&s, (4.0, 6.0));
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].m, 0.0);
    }

    #[test]
    fn localization_bound_properties() {
        let s = spec_for(4, 2.0 * PI / 3.0, 0.0, 0);
        assert_eq!(
            dynamical_localization_bound(&s, (10.0, 11.0), 0.0, 4.0, &[0.0, 1.0]),
            0.0
        );
        let ts = [0.0, 0.5, 2.0];
        let a = dynamical_localization_bound(&s, (-1.9, -0.8), 0.2, 1.0, &ts);
        let b = dynamical_localization_bound(&s, (-1.9, -0.8), 0.5, 1.0, &ts);
        assert!(a > 0.0 && b >= a);
        let prof = dynamical_localization_profile(&s, (-1.9, -0.8), 0.2, &[0.0, 1.0, 2.0], &ts);
        assert!(prof[0].1 >= prof[1].1 && prof[1].1 >= prof[2].1);
    }
}
