//! Lattice boxes, sites and diagonal operators.
//!
//! Sites are ordered row-major: `x2` is the slow (outer) coordinate and `x1`
//! the fast one, so `index(x1, x2) = (x2 - x2_min) * width + (x1 - x1_min)`.

use faer::c64;

use crate::error::{HallError, Result};

/// Rectangular window `[x1_min, x1_max] × [x2_min, x2_max]` of ℤ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    pub x1_min: i64,
    pub x1_max: i64,
    pub x2_min: i64,
    pub x2_max: i64,
}

pub fn make_box(x1: (i64, i64), x2: (i64, i64)) -> Result<LatticeBox> {
    LatticeBox::new(x1, x2)
}

impl LatticeBox {
    pub fn new(x1: (i64, i64), x2: (i64, i64)) -> Result<Self> {
        if x1.0 > x1.1 || x2.0 > x2.1 {
            return Err(HallError::Config(format!(
                "empty box range x1={x1:?} x2={x2:?}"
            )));
        }
        Ok(Self {
            x1_min: x1.0,
            x1_max: x1.1,
            x2_min: x2.0,
            x2_max: x2.1,
        })
    }

    /// Square box `[-r, r]²`.
    pub fn centered(r: i64) -> Result<Self> {
        Self::new((-r, r), (-r, r))
    }

    pub fn width(&self) -> usize {
        (self.x1_max - self.x1_min + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.x2_max - self.x2_min + 1) as usize
    }

    pub fn n_sites(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, x1: i64, x2: i64) -> bool {
        x1 >= self.x1_min && x1 <= self.x1_max && x2 >= self.x2_min && x2 <= self.x2_max
    }

    pub fn index(&self, x1: i64, x2: i64) -> Option<usize> {
        if !self.contains(x1, x2) {
            return None;
        }
        Some((x2 - self.x2_min) as usize * self.width() + (x1 - self.x1_min) as usize)
    }

    pub fn site(&self, k: usize) -> (i64, i64) {
        let w = self.width();
        (self.x1_min + (k % w) as i64, self.x2_min + (k / w) as i64)
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.n_sites()).map(move |k| self.site(k))
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        self.contains(other.x1_min, other.x2_min) && self.contains(other.x1_max, other.x2_max)
    }

    /// 1-norm distance from a site to the nearest site outside the box, minus one.
    pub fn depth(&self, x1: i64, x2: i64) -> i64 {
        (x1 - self.x1_min)
            .min(self.x1_max - x1)
            .min(x2 - self.x2_min)
            .min(self.x2_max - x2)
    }
}

/// A point of ℤ² or of the dual lattice, stored as twice its coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SitePoint {
    pub tx1: i64,
    pub tx2: i64,
}

impl SitePoint {
    pub fn site(x1: i64, x2: i64) -> Self {
        Self {
            tx1: 2 * x1,
            tx2: 2 * x2,
        }
    }

    pub fn from_twice(tx1: i64, tx2: i64) -> Self {
        Self { tx1, tx2 }
    }

    /// Plaquette center `(x1 + 1/2, x2 + 1/2)`.
    pub fn plaquette(x1: i64, x2: i64) -> Self {
        Self {
            tx1: 2 * x1 + 1,
            tx2: 2 * x2 + 1,
        }
    }

    pub fn is_plaquette_center(&self) -> bool {
        self.tx1.rem_euclid(2) == 1 && self.tx2.rem_euclid(2) == 1
    }

    pub fn is_site(&self) -> bool {
        self.tx1.rem_euclid(2) == 0 && self.tx2.rem_euclid(2) == 0
    }

    pub fn x1(&self) -> f64 {
        self.tx1 as f64 / 2.0
    }

    pub fn x2(&self) -> f64 {
        self.tx2 as f64 / 2.0
    }

    /// Twice the 1-norm distance to a lattice site.
    pub fn twice_dist1(&self, x1: i64, x2: i64) -> i64 {
        (2 * x1 - self.tx1).abs() + (2 * x2 - self.tx2).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Axis::X1),
            2 => Ok(Axis::X2),
            _ => Err(HallError::Config(format!("axis must be 1 or 2, got {i}"))),
        }
    }

    fn pick(self, x1: i64, x2: i64) -> i64 {
        match self {
            Axis::X1 => x1,
            Axis::X2 => x2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    pub bx: LatticeBox,
    pub values: Vec<c64>,
    pub real: bool,
}

impl DiagonalOperator {
    pub fn from_real(bx: LatticeBox, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), bx.n_sites());
        Self {
            bx,
            values: values.into_iter().map(|v| c64::new(v, 0.0)).collect(),
            real: true,
        }
    }

    pub fn from_complex(bx: LatticeBox, values: Vec<c64>) -> Self {
        assert_eq!(values.len(), bx.n_sites());
        Self {
            bx,
            values,
            real: false,
        }
    }

    pub fn identity(bx: LatticeBox) -> Self {
        Self::from_real(bx, vec![1.0; bx.n_sites()])
    }

    pub fn zeros(bx: LatticeBox) -> Self {
        Self::from_real(bx, vec![0.0; bx.n_sites()])
    }

    pub fn at(&self, x1: i64, x2: i64) -> Option<c64> {
        self.bx.index(x1, x2).map(|k| self.values[k])
    }

    pub fn re(&self, k: usize) -> f64 {
        self.values[k].re
    }

    pub fn conj(&self) -> Self {
        Self {
            bx: self.bx,
            values: self.values.iter().map(|v| v.conj()).collect(),
            real: self.real,
        }
    }

    /// `1 - Λ`.
    pub fn complement(&self) -> Self {
        Self {
            bx: self.bx,
            values: self.values.iter().map(|v| c64::new(1.0, 0.0) - v).collect(),
            real: self.real,
        }
    }
}

/// Indicator of `x_axis < offset`; `offset_twice` is twice the offset so that
/// half-integer cuts are exact.
pub fn switch_function(bx: LatticeBox, axis: Axis, offset_twice: i64) -> DiagonalOperator {
    let values = bx
        .sites()
        .map(|(x1, x2)| {
            if 2 * axis.pick(x1, x2) < offset_twice {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    DiagonalOperator::from_real(bx, values)
}

/// Standard pair `Λ1 = [x1 < 0]`, `Λ2 = [x2 < 0]`.
pub fn switch_pair(bx: LatticeBox) -> (DiagonalOperator, DiagonalOperator) {
    (
        switch_function(bx, Axis::X1, 0),
        switch_function(bx, Axis::X2, 0),
    )
}

/// Diagonal `e^{δℓ(x)}`; ℓ must be 1-Lipschitz along every bond of the box.
pub fn lipschitz_weight<F>(bx: LatticeBox, ell: F, delta: f64) -> Result<DiagonalOperator>
where
    F: Fn(i64, i64) -> f64,
{
    for (x1, x2) in bx.sites() {
        let l0 = ell(x1, x2);
        for (y1, y2) in [(x1 + 1, x2), (x1, x2 + 1)] {
            if bx.contains(y1, y2) && (ell(y1, y2) - l0).abs() > 1.0 + 1e-12 {
                return Err(HallError::Contract(format!(
                    "weight function is not 1-Lipschitz between ({x1},{x2}) and ({y1},{y2})"
                )));
            }
        }
    }
    let values = bx
        .sites()
        .map(|(x1, x2)| (delta * ell(x1, x2)).exp())
        .collect();
    Ok(DiagonalOperator::from_real(bx, values))
}

/// `½ (x−y)∧(y−z)`.
pub fn oriented_area(x: SitePoint, y: SitePoint, z: SitePoint) -> f64 {
    let twice4 = (x.tx1 - y.tx1) * (y.tx2 - z.tx2) - (x.tx2 - y.tx2) * (y.tx1 - z.tx1);
    twice4 as f64 / 8.0
}

/// Signed angle at `p` from `u` to `v`.
pub fn sight_angle(p: SitePoint, u: SitePoint, v: SitePoint) -> f64 {
    let (a1, a2) = ((u.tx1 - p.tx1) as f64, (u.tx2 - p.tx2) as f64);
    let (b1, b2) = ((v.tx1 - p.tx1) as f64, (v.tx2 - p.tx2) as f64);
    let cross = a1 * b2 - a2 * b1;
    let dot = a1 * b1 + a2 * b2;
    if cross == 0.0 && dot < 0.0 {
        // p sits on the segment between u and v
        return 0.0;
    }
    cross.atan2(dot)
}
