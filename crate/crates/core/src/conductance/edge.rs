use faer::{c64, Mat};

use crate::conductance::{ConductanceReport, TraceWindow};
use crate::error::{HallError, Result};
use crate::lattice::{switch_pair, DiagonalOperator};
use crate::operators::{commutator_switch, LatticeOperator};
use crate::spectral::{eigendecompose, time_average_kernel, SmoothStep, Spectrum};

/// A Hamiltonian with its spectrum and the switch functions `[x1 < 0]`, `[x2 < 0]`.
#[derive(Debug, Clone)]
pub struct SwitchedSystem {
    pub h: LatticeOperator,
    pub spec: Spectrum,
    pub l1: DiagonalOperator,
    pub l2: DiagonalOperator,
}

impl SwitchedSystem {
    pub fn new(h: LatticeOperator) -> Result<Self> {
        let spec = eigendecompose(&h)?;
        let (l1, l2) = switch_pair(h.bx);
        Ok(Self { h, spec, l1, l2 })
    }

    fn active(&self, rho: &SmoothStep) -> Vec<(usize, f64)> {
        self.spec
            .eigenvalues
            .iter()
            .enumerate()
            .filter_map(|(k, &l)| {
                let d = rho.rho_prime(l);
                (d != 0.0).then_some((k, d))
            })
            .collect()
    }

    /// Rows `J` of `U† Λ U`.
    fn eigen_rows(&self, l: &DiagonalOperator, rows: &[usize]) -> Mat<c64> {
        let u = &self.spec.vectors;
        let n = u.nrows();
        let uj = Mat::from_fn(rows.len(), n, |a, x| u[(x, rows[a])].conj() * l.values[x]);
        &uj * u
    }
}

/// Windowed edge trace and its imaginary residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCurrent {
    pub value: f64,
    pub imag_residual: f64,
}

/// `−(i/2) tr ρ′(H){[H,Λ1], Ã}` where `Ã_jk = (U†Λ2U)_jk κ(λ_j − λ_k)`.
fn symmetrized_current<K: Fn(f64) -> c64>(
    sys: &SwitchedSystem,
    rho: &SmoothStep,
    kernel: K,
) -> EdgeCurrent {
    let act = sys.active(rho);
    if act.is_empty() {
        return EdgeCurrent {
            value: 0.0,
            imag_residual: 0.0,
        };
    }
    let rows: Vec<usize> = act.iter().map(|a| a.0).collect();
    let l1 = sys.eigen_rows(&sys.l1, &rows);
    let l2 = sys.eigen_rows(&sys.l2, &rows);
    let lam = &sys.spec.eigenvalues;
    let mut total = c64::new(0.0, 0.0);
    for (a, &(j, dj)) in act.iter().enumerate() {
        let mut s = c64::new(0.0, 0.0);
        for k in 0..lam.len() {
            let w = lam[j] - lam[k];
            if w == 0.0 {
                continue;
            }
            // C̃_jk = (λ_j − λ_k) L1_jk, and L_kj = conj(L_jk)
            let c_jk = l1[(a, k)] * w;
            let c_kj = -l1[(a, k)].conj() * w;
            let a_kj = l2[(a, k)].conj() * kernel(-w);
            let a_jk = l2[(a, k)] * kernel(w);
            s += c_jk * a_kj + a_jk * c_kj;
        }
        total += s * dj;
    }
    let v = c64::new(0.0, -0.5) * total;
    EdgeCurrent {
        value: v.re,
        imag_residual: v.im,
    }
}

/// `−(i/2) tr ρ′(H_a){[H_a,Λ1], Λ2(t)}` with `Λ2(t) = e^{iH_a t} Λ2 e^{−iH_a t}`.
pub fn windowed_edge_current(edge: &SwitchedSystem, rho: &SmoothStep, t: f64) -> EdgeCurrent {
    symmetrized_current(edge, rho, |w| c64::cis(w * t))
}

/// `−i tr ρ′(H_a)[H_a, Λ1]` restricted to rows below `cut` (default: the middle
/// row of the strip); the trace over the whole strip is reported as residual.
pub fn edge_conductance_gap(
    edge: &SwitchedSystem,
    rho: &SmoothStep,
    cut: Option<i64>,
) -> Result<ConductanceReport> {
    let bx = edge.h.bx;
    let cut = cut.unwrap_or_else(|| (bx.x2_min + bx.x2_max + 1).div_euclid(2));
    let window = TraceWindow::RowsBelow(cut);
    window.sites(&bx)?;
    let c = commutator_switch(&edge.h, &edge.l1)?;
    let act = edge.active(rho);
    let u = &edge.spec.vectors;
    // (ρ′(H) C)_xx = Σ_y ρ′(H)(x,y) C(y,x)
    let mut diag_cut = c64::new(0.0, 0.0);
    let mut diag_all = c64::new(0.0, 0.0);
    for (y, x, cv) in c.triplets() {
        let r: c64 = act
            .iter()
            .map(|&(j, d)| u[(x, j)] * u[(y, j)].conj() * d)
            .sum();
        let term = r * cv;
        diag_all += term;
        if bx.site(x).1 < cut {
            diag_cut += term;
        }
    }
    let mi = c64::new(0.0, -1.0);
    let v = mi * diag_cut;
    let mut rep = ConductanceReport::new(v.re, window, bx);
    rep.imag_residual = v.im;
    rep.full_trace_residual = Some((mi * diag_all).norm());
    rep.parameters = vec![
        ("delta_lo", rho.lo),
        ("delta_hi", rho.hi),
        ("row_cut", cut as f64),
    ];
    Ok(rep)
}

/// Excludes eigenvectors living on the artificial boundary of the bulk box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFilter {
    /// Sites with `depth < width` form the boundary layer.
    pub width: i64,
    /// Levels with more than this weight in the layer are skipped.
    pub max_weight: f64,
}

impl Default for BoundaryFilter {
    fn default() -> Self {
        Self {
            width: 3,
            max_weight: 0.5,
        }
    }
}

impl BoundaryFilter {
    pub fn off() -> Self {
        Self {
            width: 0,
            max_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateCorrection {
    pub value: f64,
    /// `(λ, ρ′(λ), Im tr E_λ[H,Λ1]Λ2(t)E_λ)` for each retained level.
    pub levels: Vec<(f64, f64, f64)>,
    pub skipped: usize,
}

/// `Σ_{λ∈Δ} ρ′(λ) Im tr E_λ [H_B,Λ1] e^{iH_B t} Λ2 e^{−iH_B t} E_λ`.
pub fn bound_state_correction(
    bulk: &SwitchedSystem,
    rho: &SmoothStep,
    t: f64,
    filter: BoundaryFilter,
) -> Result<BoundStateCorrection> {
    let bx = bulk.h.bx;
    let c = commutator_switch(&bulk.h, &bulk.l1)?;
    let spec = &bulk.spec;
    let u = &spec.vectors;
    let n = spec.len();
    let mut out = BoundStateCorrection {
        value: 0.0,
        levels: Vec::new(),
        skipped: 0,
    };
    for cl in spec.clusters() {
        let d = rho.rho_prime(cl.value);
        if d == 0.0 {
            continue;
        }
        let idx: Vec<usize> = cl.range.clone().collect();
        let v = spec.columns(&idx);
        let m = idx.len() as f64;
        let edge_weight: f64 = (0..n)
            .filter(|&x| {
                let (a, b) = bx.site(x);
                bx.depth(a, b) < filter.width
            })
            .map(|x| (0..idx.len()).map(|k| v[(x, k)].norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / m;
        if edge_weight > filter.max_weight {
            out.skipped += 1;
            continue;
        }
        // Λ2(t) V = U e^{iΛt} U† Λ2 V e^{−iλt}
        let l2v = Mat::from_fn(n, idx.len(), |x, k| v[(x, k)] * bulk.l2.values[x]);
        let mut coef = u.adjoint() * &l2v;
        for j in 0..n {
            let ph = c64::cis((spec.eigenvalues[j] - cl.value) * t);
            for k in 0..idx.len() {
                coef[(j, k)] *= ph;
            }
        }
        let evolved = u * &coef;
        let cv = &c.matrix * &evolved;
        let tr: c64 = (0..idx.len())
            .map(|k| (0..n).map(|x| v[(x, k)].conj() * cv[(x, k)]).sum::<c64>())
            .sum();
        out.levels.push((cl.value, d, tr.im));
        out.value += d * tr.im;
    }
    Ok(out)
}

/// Edge current at `t = 0` plus the persistent-current sum of bulk levels in Δ.
pub fn sigma_e1(
    edge: &SwitchedSystem,
    bulk: &SwitchedSystem,
    rho: &SmoothStep,
    filter: BoundaryFilter,
) -> Result<ConductanceReport> {
    let cur = windowed_edge_current(edge, rho, 0.0);
    let corr = bound_state_correction(bulk, rho, 0.0, filter)?;
    // at t = 0, Im tr E[H,Λ1]Λ2E = −Im tr E Λ1 H Λ2 E
    let persistent = -corr.value;
    let mut rep =
        ConductanceReport::new(cur.value + persistent, TraceWindow::RowsBelow(0), edge.h.bx);
    rep.imag_residual = cur.imag_residual;
    rep.parameters = vec![("delta_lo", rho.lo), ("delta_hi", rho.hi), ("t", 0.0)];
    rep.components = vec![
        ("edge_current", cur.value),
        ("bound_state_sum", persistent),
        ("levels_used", corr.levels.len() as f64),
        ("levels_skipped", corr.skipped as f64),
    ];
    Ok(rep)
}

/// Edge current with `Λ2` replaced by its Heisenberg time average over `[0, T]`.
pub fn sigma_e2(edge: &SwitchedSystem, rho: &SmoothStep, t_max: f64) -> Result<ConductanceReport> {
    if !(t_max > 0.0) {
        return Err(HallError::Domain(format!(
            "averaging time must be positive, got {t_max}"
        )));
    }
    let tol = edge.spec.degeneracy_tol();
    let cur = symmetrized_current(edge, rho, |w| time_average_kernel(w, t_max, tol));
    let mut rep = ConductanceReport::new(cur.value, TraceWindow::RowsBelow(0), edge.h.bx);
    rep.imag_residual = cur.imag_residual;
    rep.parameters = vec![("delta_lo", rho.lo), ("delta_hi", rho.hi), ("T", t_max)];
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares the edge current at time `t` with `σ_B` plus the bulk correction at `t`.
pub fn instantaneous_identity_check(
    edge: &SwitchedSystem,
    bulk: &SwitchedSystem,
    rho: &SmoothStep,
    sigma_b: f64,
    t: f64,
    filter: BoundaryFilter,
) -> Result<IdentityCheck> {
    let lhs = windowed_edge_current(edge, rho, t).value;
    let rhs = sigma_b + bound_state_correction(bulk, rho, t, filter)?.value;
    Ok(IdentityCheck {
        t,
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
