use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use crate::error::{HallError, Result};
use crate::lattice::{switch_pair, DiagonalOperator, LatticeBox};
use crate::operators::{commutator_entries, commutator_switch, harper_entries, harper_hamiltonian};

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventTraceResult {
    pub z: c64,
    /// `tr R(z)[H,Λ1]R(z)[H,Λ2]R(z)`.
    pub value: c64,
    pub bx: LatticeBox,
    /// |value − value on a larger box|, when computed.
    pub box_delta: Option<f64>,
}

fn check_crossing(bx: &LatticeBox) -> Result<()> {
    if !(bx.contains(-1, -1) && bx.contains(0, 0)) {
        return Err(HallError::Config(format!(
            "{bx:?} does not contain the switch crossing"
        )));
    }
    Ok(())
}

/// `tr R C1 R C2 R` for `R = (H − z)^{−1}`, with `H` given by its nonzero
/// entries. Only the sites touched by `C1` enter:
/// `tr = Σ_{(a,b)} C1(a,b) (R†e_b)† C2 (R² e_a)`.
pub fn resolvent_trace(
    n: usize,
    h: &[(usize, usize, c64)],
    z: c64,
    c1: &[(usize, usize, c64)],
    c2: &[(usize, usize, c64)],
) -> Result<c64> {
    if z.im == 0.0 {
        return Err(HallError::Singular(format!("z = {z} is real")));
    }
    let mut trip: Vec<Triplet<usize, usize, c64>> =
        h.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    trip.extend((0..n).map(|i| Triplet::new(i, i, -z)));
    let a = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| HallError::Singular(format!("{e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| HallError::Singular(format!("{e:?}")))?;

    let mut support: Vec<usize> = c1.iter().flat_map(|&(i, j, _)| [i, j]).collect();
    support.sort_unstable();
    support.dedup();
    let k = support.len();
    if k == 0 {
        return Ok(c64::new(0.0, 0.0));
    }
    let mut slot = vec![usize::MAX; n];
    for (s, &site) in support.iter().enumerate() {
        slot[site] = s;
    }
    let e = Mat::from_fn(n, k, |i, s| {
        if support[s] == i {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let r1 = lu.solve(&e);
    let r2 = lu.solve(&r1);
    let radj = lu.solve_adjoint(&e);
    let mut c2r2 = Mat::<c64>::zeros(n, k);
    for &(i, j, v) in c2 {
        for s in 0..k {
            c2r2[(i, s)] += v * r2[(j, s)];
        }
    }
    let y = radj.adjoint() * &c2r2;
    let mut tr = c64::new(0.0, 0.0);
    for &(a, b, v) in c1 {
        tr += v * y[(slot[b], slot[a])];
    }
    if !tr.re.is_finite() || !tr.im.is_finite() {
        return Err(HallError::Singular(format!("non-finite trace at z = {z}")));
    }
    Ok(tr)
}

fn trace_with_potential(
    phi: f64,
    z: c64,
    bx: LatticeBox,
    v: Option<&DiagonalOperator>,
) -> Result<c64> {
    check_crossing(&bx)?;
    let (l1, l2) = switch_pair(bx);
    let mut h = harper_entries(&bx, phi);
    let c1 = commutator_entries(&h, &l1);
    let c2 = commutator_entries(&h, &l2);
    if let Some(v) = v {
        h.extend(
            v.values
                .iter()
                .enumerate()
                .filter(|(_, x)| x.re != 0.0)
                .map(|(k, &x)| (k, k, x)),
        );
    }
    resolvent_trace(bx.n_sites(), &h, z, &c1, &c2)
}

/// `tr T_φ(z)` on `bx` by sparse shifted solves.
pub fn t_phi_trace(phi: f64, z: c64, bx: LatticeBox) -> Result<ResolventTraceResult> {
    let value = trace_with_potential(phi, z, bx, None)?;
    Ok(ResolventTraceResult {
        z,
        value,
        bx,
        box_delta: None,
    })
}

/// [`t_phi_trace`] with the difference to a larger box recorded.
pub fn t_phi_trace_checked(
    phi: f64,
    z: c64,
    bx: LatticeBox,
    larger: LatticeBox,
) -> Result<ResolventTraceResult> {
    if !larger.contains_box(&bx) {
        return Err(HallError::Config(format!(
            "{larger:?} does not contain {bx:?}"
        )));
    }
    let mut r = t_phi_trace(phi, z, bx)?;
    let big = t_phi_trace(phi, z, larger)?;
    r.box_delta = Some((big.value - r.value).norm());
    Ok(r)
}

/// `tr T_B(z)` for `H_φ + V`; the commutators do not see the potential.
pub fn t_b_trace(phi: f64, v: &DiagonalOperator, z: c64) -> Result<c64> {
    trace_with_potential(phi, z, v.bx, Some(v))
}

/// Dense reference: forms `R(z)` by LU.
pub fn t_phi_trace_dense(phi: f64, z: c64, bx: LatticeBox) -> Result<c64> {
    check_crossing(&bx)?;
    if z.im == 0.0 {
        return Err(HallError::Singular(format!("z = {z} is real")));
    }
    let h = harper_hamiltonian(bx, phi);
    let (l1, l2) = switch_pair(bx);
    let c1 = commutator_switch(&h, &l1)?;
    let c2 = commutator_switch(&h, &l2)?;
    let n = bx.n_sites();
    let a = Mat::from_fn(n, n, |i, j| {
        h.matrix[(i, j)] - if i == j { z } else { c64::new(0.0, 0.0) }
    });
    let r = a.partial_piv_lu().inverse();
    let t = &r * (&c1.matrix * (&r * (&c2.matrix * &r)));
    Ok((0..n).map(|k| t[(k, k)]).sum())
}
