//! Lattice operators: Harper Hamiltonian, disorder, edge restriction and
//! commutators with switch functions.

mod disorder;
mod edge;

pub use disorder::{cauchy_potential, derive_seed, site_uniform, DisorderConfig};
pub use edge::{boundary_defect_norm, restrict_half_plane, EdgeGeometry};

use faer::{c64, Mat};

use crate::error::{HallError, Result};
use crate::lattice::{DiagonalOperator, LatticeBox};

const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix indexed by the sites of a box.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    pub bx: LatticeBox,
    pub matrix: Mat<c64>,
    pub hermitian: bool,
}

impl LatticeOperator {
    pub fn new(bx: LatticeBox, matrix: Mat<c64>) -> Result<Self> {
        let n = bx.n_sites();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(HallError::BoxMismatch);
        }
        Ok(Self {
            bx,
            matrix,
            hermitian: false,
        })
    }

    /// Flags the operator hermitian after checking it.
    pub fn new_hermitian(bx: LatticeBox, matrix: Mat<c64>) -> Result<Self> {
        let mut op = Self::new(bx, matrix)?;
        let r = op.hermitian_residual();
        if r > HERMITIAN_TOL {
            return Err(HallError::NonHermitian(r));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn zeros(bx: LatticeBox) -> Self {
        let n = bx.n_sites();
        Self {
            bx,
            matrix: Mat::zeros(n, n),
            hermitian: true,
        }
    }

    pub fn identity(bx: LatticeBox) -> Self {
        let n = bx.n_sites();
        Self {
            bx,
            matrix: Mat::identity(n, n),
            hermitian: true,
        }
    }

    pub fn from_diagonal(d: &DiagonalOperator) -> Self {
        let n = d.bx.n_sites();
        let matrix = Mat::from_fn(n, n, |i, j| {
            if i == j {
                d.values[i]
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Self {
            bx: d.bx,
            matrix,
            hermitian: d.real,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, x: (i64, i64), y: (i64, i64)) -> Option<c64> {
        let i = self.bx.index(x.0, x.1)?;
        let j = self.bx.index(y.0, y.1)?;
        Some(self.matrix[(i, j)])
    }

    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut r = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                r = r.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `max(max row sum, max column sum)` of |entries|, an upper bound on the operator norm.
    pub fn holmgren_norm(&self) -> f64 {
        holmgren(&self.matrix)
    }

    pub fn plus_diagonal(&self, d: &DiagonalOperator) -> Result<Self> {
        if d.bx != self.bx {
            return Err(HallError::BoxMismatch);
        }
        let mut out = self.clone();
        for k in 0..self.dim() {
            out.matrix[(k, k)] += d.values[k];
        }
        out.hermitian = self.hermitian && d.real;
        Ok(out)
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|k| self.matrix[(k, k)]).sum()
    }

    pub fn sub(&self, other: &LatticeOperator) -> Result<Self> {
        if self.bx != other.bx {
            return Err(HallError::BoxMismatch);
        }
        Ok(Self {
            bx: self.bx,
            matrix: &self.matrix - &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn matmul(&self, other: &LatticeOperator) -> Result<Self> {
        if self.bx != other.bx {
            return Err(HallError::BoxMismatch);
        }
        Ok(Self {
            bx: self.bx,
            matrix: &self.matrix * &other.matrix,
            hermitian: false,
        })
    }

    /// Nonzero entries as `(row, col, value)`, column by column.
    pub fn triplets(&self) -> Vec<(usize, usize, c64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = self.matrix[(i, j)];
                if v != c64::new(0.0, 0.0) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

pub(crate) fn holmgren(m: &Mat<c64>) -> f64 {
    let (r, c) = (m.nrows(), m.ncols());
    let mut rows = vec![0.0f64; r];
    let mut cmax = 0.0f64;
    for j in 0..c {
        let mut s = 0.0;
        for i in 0..r {
            let a = m[(i, j)].norm();
            rows[i] += a;
            s += a;
        }
        cmax = cmax.max(s);
    }
    rows.into_iter().fold(cmax, f64::max)
}

/// Nearest-neighbour Harper hopping in Landau gauge, open boundaries.
///
/// Each bond is listed once per direction, so the list is closed under
/// conjugate transposition.
pub fn harper_entries(bx: &LatticeBox, phi: f64) -> Vec<(usize, usize, c64)> {
    let one = c64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(4 * bx.n_sites());
    for (x1, x2) in bx.sites() {
        let i = bx.index(x1, x2).unwrap();
        if let Some(j) = bx.index(x1 + 1, x2) {
            out.push((i, j, one));
            out.push((j, i, one));
        }
        // H(x, x') = e^{iφ x1} for x = x' + e2
        if let Some(j) = bx.index(x1, x2 - 1) {
            let h = c64::cis(phi * x1 as f64);
            out.push((i, j, h));
            out.push((j, i, h.conj()));
        }
    }
    out
}

pub fn harper_hamiltonian(bx: LatticeBox, phi: f64) -> LatticeOperator {
    let n = bx.n_sites();
    let mut m = Mat::<c64>::zeros(n, n);
    for (i, j, v) in harper_entries(&bx, phi) {
        m[(i, j)] = v;
    }
    LatticeOperator {
        bx,
        matrix: m,
        hermitian: true,
    }
}

/// `[H, Λ](x, x') = (Λ(x') − Λ(x)) H(x, x')`.
pub fn commutator_switch(h: &LatticeOperator, lam: &DiagonalOperator) -> Result<LatticeOperator> {
    if h.bx != lam.bx {
        return Err(HallError::BoxMismatch);
    }
    let n = h.dim();
    let matrix = Mat::from_fn(n, n, |i, j| {
        let d = lam.values[j] - lam.values[i];
        if d == c64::new(0.0, 0.0) {
            c64::new(0.0, 0.0)
        } else {
            d * h.matrix[(i, j)]
        }
    });
    Ok(LatticeOperator {
        bx: h.bx,
        matrix,
        hermitian: false,
    })
}

/// Sparse version of [`commutator_switch`] acting on an entry list.
pub fn commutator_entries(
    entries: &[(usize, usize, c64)],
    lam: &DiagonalOperator,
) -> Vec<(usize, usize, c64)> {
    entries
        .iter()
        .filter_map(|&(i, j, v)| {
            let d = lam.values[j] - lam.values[i];
            (d != c64::new(0.0, 0.0)).then(|| (i, j, d * v))
        })
        .collect()
}

fn dist1(a: (i64, i64), b: (i64, i64)) -> f64 {
    ((a.0 - b.0).abs() + (a.1 - b.1).abs()) as f64
}

/// `sup_x Σ_{x'} |H(x,x')| (e^{μ|x−x'|} − 1)` over the box.
pub fn short_range_constant(h: &LatticeOperator, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(HallError::Domain(format!("mu must be positive, got {mu}")));
    }
    Ok(short_range_profile(h, mu).into_iter().fold(0.0, f64::max))
}

/// Per-site row sums of the short-range weight, in site order.
pub fn short_range_profile(h: &LatticeOperator, mu: f64) -> Vec<f64> {
    let n = h.dim();
    (0..n)
        .map(|i| {
            let x = h.bx.site(i);
            (0..n)
                .filter(|&j| j != i)
                .map(|j| h.matrix[(i, j)].norm() * (mu * dist1(x, h.bx.site(j))).exp_m1())
                .sum()
        })
        .collect()
}
