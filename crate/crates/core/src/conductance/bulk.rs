use faer::{c64, Mat};

use crate::conductance::{window_sum, ConductanceReport, TraceWindow};
use crate::error::{HallError, Result};
use crate::lattice::DiagonalOperator;
use crate::operators::LatticeOperator;
use crate::spectral::{max_abs, EnergySet, Spectrum};

const IDEMPOTENCE_TOL: f64 = 1e-8;

fn check_boxes(p: &LatticeOperator, l1: &DiagonalOperator, l2: &DiagonalOperator) -> Result<()> {
    if p.bx != l1.bx || p.bx != l2.bx {
        return Err(HallError::BoxMismatch);
    }
    Ok(())
}

/// `[P, Λ]` for a diagonal Λ.
fn comm(p: &Mat<c64>, l: &DiagonalOperator) -> Mat<c64> {
    Mat::from_fn(p.nrows(), p.ncols(), |i, j| {
        p[(i, j)] * (l.values[j] - l.values[i])
    })
}

/// Diagonal of `a·b` without forming the product.
fn diag_of_product(a: &Mat<c64>, b: &Mat<c64>) -> Vec<c64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|k| a[(i, k)] * b[(k, i)]).sum())
        .collect()
}

/// Diagonal of `P[[P,Λ1],[P,Λ2]]`.
pub fn kubo_diagonal(
    p: &LatticeOperator,
    l1: &DiagonalOperator,
    l2: &DiagonalOperator,
) -> Result<Vec<c64>> {
    check_boxes(p, l1, l2)?;
    let a = comm(&p.matrix, l1);
    let b = comm(&p.matrix, l2);
    let m = &a * &b - &b * &a;
    Ok(diag_of_product(&p.matrix, &m))
}

/// `−i Σ_{x∈W} ⟨x|P[[P,Λ1],[P,Λ2]]|x⟩`.
pub fn kubo_streda(
    p: &LatticeOperator,
    l1: &DiagonalOperator,
    l2: &DiagonalOperator,
    window: TraceWindow,
) -> Result<ConductanceReport> {
    check_boxes(p, l1, l2)?;
    let sites = window.sites(&p.bx)?;
    let p2 = &p.matrix * &p.matrix;
    let err = max_abs((&p2 - &p.matrix).as_ref());
    if err > IDEMPOTENCE_TOL {
        return Err(HallError::Contract(format!(
            "P is not a projection (|P²−P| = {err:e})"
        )));
    }
    let diag = kubo_diagonal(p, l1, l2)?;
    Ok(report_from_diagonal(&diag, window, &sites, p, |d| {
        c64::new(0.0, -1.0) * d
    }))
}

fn report_from_diagonal<F: Fn(c64) -> c64>(
    diag: &[c64],
    window: TraceWindow,
    sites: &[usize],
    p: &LatticeOperator,
    prefactor: F,
) -> ConductanceReport {
    let v = prefactor(window_sum(diag, sites));
    let full: c64 = prefactor(diag.iter().copied().sum());
    let mut r = ConductanceReport::new(v.re, window, p.bx);
    r.imag_residual = v.im;
    r.full_trace_residual = Some(full.norm());
    r.window_sensitivity = window
        .grown(4)
        .and_then(|w| w.sites(&p.bx).ok())
        .map(|big| (prefactor(window_sum(diag, &big)).re - v.re).abs());
    r
}

/// `i Σ_{x∈W} ⟨x|E Λ1 E⊥ Λ2 E − E Λ2 E⊥ Λ1 E|x⟩` with `E = E_S(H)`.
pub fn sigma_b_set(
    spec: &Spectrum,
    s: &EnergySet,
    l1: &DiagonalOperator,
    l2: &DiagonalOperator,
    window: TraceWindow,
) -> Result<f64> {
    let idx = spec.select(s)?;
    let e = crate::spectral::projection_from_indices(spec, &idx);
    check_boxes(&e, l1, l2)?;
    let sites = window.sites(&spec.bx)?;
    let em = &e.matrix;
    // E⊥ Λ E = ΛE − E(ΛE)
    let perp = |l: &DiagonalOperator| {
        let le = Mat::from_fn(em.nrows(), em.ncols(), |i, j| l.values[i] * em[(i, j)]);
        &le - em * &le
    };
    let left = |l: &DiagonalOperator| {
        Mat::from_fn(em.nrows(), em.ncols(), |i, j| em[(i, j)] * l.values[j])
    };
    let d1 = diag_of_product(&left(l1), &perp(l2));
    let d2 = diag_of_product(&left(l2), &perp(l1));
    let diag: Vec<c64> = d1.iter().zip(&d2).map(|(a, b)| a - b).collect();
    Ok((c64::new(0.0, 1.0) * window_sum(&diag, &sites)).re)
}

/// One eigenvalue block of the decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTerm {
    pub lambda: f64,
    /// `i tr_W E_λ T E_λ`.
    pub t_block: f64,
    /// `i tr_W E_λ [P, Λ1] Λ2 E_λ`.
    pub commutator_block: f64,
}

/// The three blocks `E_−`, `E_+`, `E_Δ` of the bulk conductance at `λ0 ∈ Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub term_minus: f64,
    pub term_plus: f64,
    pub term_delta: f64,
    pub levels: Vec<LevelTerm>,
}

impl Decomposition {
    pub fn total(&self) -> f64 {
        self.term_minus + self.term_plus + self.term_delta
    }

    pub fn level_sum(&self) -> f64 {
        self.levels.iter().map(|l| l.t_block).sum()
    }
}

/// `Σ_{x∈W} (V G V†)(x,x)` for `G = V† Y V`, returned together with `G`.
fn block_window_trace(v: &Mat<c64>, yv: &Mat<c64>, sites: &[usize]) -> (c64, Mat<c64>) {
    let g = v.adjoint() * yv;
    let vg = v * &g;
    let t = sites
        .iter()
        .map(|&x| {
            (0..v.ncols())
                .map(|k| vg[(x, k)] * v[(x, k)].conj())
                .sum::<c64>()
        })
        .sum();
    (t, g)
}

fn diag_scale_rows(l: &DiagonalOperator, m: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| l.values[i] * m[(i, j)])
}

/// Splits the windowed bulk conductance at `λ0` into the blocks below, above
/// and inside `Δ = (lo, hi)`, with the inside block also resolved per eigenvalue.
pub fn sigma_b_decomposition(
    spec: &Spectrum,
    delta: (f64, f64),
    lambda0: f64,
    l1: &DiagonalOperator,
    l2: &DiagonalOperator,
    window: TraceWindow,
) -> Result<Decomposition> {
    if !(delta.0 < lambda0 && lambda0 < delta.1) {
        return Err(HallError::Domain(format!(
            "λ0 = {lambda0} is not inside {delta:?}"
        )));
    }
    let sites = window.sites(&spec.bx)?;
    let p_idx = spec.select(&EnergySet::below(lambda0))?;
    let minus = spec.select(&EnergySet::below(delta.0))?;
    let plus = spec.select(&EnergySet::above(delta.1))?;
    let inside = spec.select(&EnergySet::interval(delta.0, delta.1))?;
    let p = crate::spectral::projection_from_indices(spec, &p_idx);
    check_boxes(&p, l1, l2)?;
    let pm = &p.matrix;
    let i = c64::new(0.0, 1.0);

    // Y = [P, Λ1] Λ2
    let y = Mat::from_fn(pm.nrows(), pm.ncols(), |r, c| {
        pm[(r, c)] * (l1.values[c] - l1.values[r]) * l2.values[c]
    });
    let outer = |idx: &[usize]| {
        if idx.is_empty() {
            return 0.0;
        }
        let v = spec.columns(idx);
        let yv = &y * &v;
        (i * block_window_trace(&v, &yv, &sites).0).re
    };
    let term_minus = outer(&minus);
    let term_plus = outer(&plus);

    let mut levels = Vec::new();
    let mut term_delta = 0.0;
    if !inside.is_empty() {
        let w = spec.columns(&inside);
        let pw = pm * &w;
        // P Λ1 P⊥ Λ2 P W
        let b = diag_scale_rows(l2, &pw);
        let c = &b - pm * &b;
        let first = pm * diag_scale_rows(l1, &c);
        // P⊥ Λ1 P Λ2 P⊥ W
        let a2 = &w - &pw;
        let c2 = pm * diag_scale_rows(l2, &a2);
        let d2 = diag_scale_rows(l1, &c2);
        let second = &d2 - pm * &d2;
        let tw = &first - &second;
        term_delta = (i * block_window_trace(&w, &tw, &sites).0).re;

        let yw = &y * &w;
        for cl in spec.clusters() {
            let local: Vec<usize> = cl
                .range
                .clone()
                .filter_map(|k| inside.iter().position(|&q| q == k))
                .collect();
            if local.is_empty() {
                continue;
            }
            let v = Mat::from_fn(w.nrows(), local.len(), |r, c| w[(r, local[c])]);
            let tv = Mat::from_fn(w.nrows(), local.len(), |r, c| tw[(r, local[c])]);
            let yv = Mat::from_fn(w.nrows(), local.len(), |r, c| yw[(r, local[c])]);
            levels.push(LevelTerm {
                lambda: cl.value,
                t_block: (i * block_window_trace(&v, &tv, &sites).0).re,
                commutator_block: (i * block_window_trace(&v, &yv, &sites).0).re,
            });
        }
    }
    Ok(Decomposition {
        term_minus,
        term_plus,
        term_delta,
        levels,
    })
}
