use faer::{c64, Mat};

use crate::error::{HallError, Result};
use crate::lattice::LatticeBox;
use crate::operators::LatticeOperator;

/// Half-plane `x2 ≥ −a` with Dirichlet truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeGeometry {
    pub a: i64,
    pub strip: LatticeBox,
}

impl EdgeGeometry {
    /// Strip `[x1_min, x1_max] × [−a, x2_max]`.
    pub fn new(a: i64, x1: (i64, i64), x2_max: i64) -> Result<Self> {
        if a < 0 {
            return Err(HallError::Config(format!(
                "edge height must be nonnegative, got {a}"
            )));
        }
        let strip = LatticeBox::new(x1, (-a, x2_max))?;
        Ok(Self { a, strip })
    }

    /// The part of `bulk` with `x2 ≥ −a` (all of it when `a` exceeds the box depth).
    pub fn within(a: i64, bulk: &LatticeBox) -> Result<Self> {
        if a < 0 {
            return Err(HallError::Config(format!(
                "edge height must be nonnegative, got {a}"
            )));
        }
        let lo = (-a).max(bulk.x2_min);
        let strip = LatticeBox::new((bulk.x1_min, bulk.x1_max), (lo, bulk.x2_max))?;
        Ok(Self { a, strip })
    }
}

/// Returns `(H_a, E_a)`; `E_a` lives on the bulk box with
/// `E_a(x, x') = −H_B(x, x')` for `x2 < −a ≤ x'2` and zero otherwise.
pub fn restrict_half_plane(
    h_b: &LatticeOperator,
    geom: &EdgeGeometry,
) -> Result<(LatticeOperator, LatticeOperator)> {
    let bulk = h_b.bx;
    let s = geom.strip;
    let rows_ok = s.x2_min == (-geom.a).max(bulk.x2_min) && s.x2_max == bulk.x2_max;
    if s.x1_min != bulk.x1_min || s.x1_max != bulk.x1_max || !rows_ok {
        return Err(HallError::Config(format!(
            "strip {s:?} is not the x2 >= {} part of {bulk:?}",
            -geom.a
        )));
    }
    let offset = bulk.index(s.x1_min, s.x2_min).unwrap();
    let m = s.n_sites();
    let mat = Mat::from_fn(m, m, |i, j| h_b.matrix[(i + offset, j + offset)]);
    let h_a = LatticeOperator {
        bx: s,
        matrix: mat,
        hermitian: h_b.hermitian,
    };

    let n = bulk.n_sites();
    let e = Mat::from_fn(n, n, |i, j| {
        if i < offset && j >= offset {
            -h_b.matrix[(i, j)]
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let e_a = LatticeOperator {
        bx: bulk,
        matrix: e,
        hermitian: false,
    };
    Ok((h_a, e_a))
}

/// `sup_x Σ_{x'} |E_a(x,x')| e^{μ(|x2+a| + |x1−x1'|)}`.
pub fn boundary_defect_norm(e_a: &LatticeOperator, mu: f64, a: i64) -> f64 {
    let bx = e_a.bx;
    let n = e_a.dim();
    let mut best = 0.0f64;
    for i in 0..n {
        let (x1, x2) = bx.site(i);
        let mut s = 0.0;
        for j in 0..n {
            let v = e_a.matrix[(i, j)].norm();
            if v != 0.0 {
                let (y1, _) = bx.site(j);
                s += v * (mu * ((x2 + a).abs() + (x1 - y1).abs()) as f64).exp();
            }
        }
        best = best.max(s);
    }
    best
}
