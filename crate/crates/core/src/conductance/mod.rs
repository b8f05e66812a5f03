//! Bulk and edge conductance functionals.

mod bulk;
mod edge;

pub use bulk::{
    kubo_diagonal, kubo_streda, sigma_b_decomposition, sigma_b_set, Decomposition, LevelTerm,
};
pub use edge::{
    bound_state_correction, edge_conductance_gap, instantaneous_identity_check, sigma_e1, sigma_e2,
    windowed_edge_current, BoundStateCorrection, BoundaryFilter, EdgeCurrent, IdentityCheck,
    SwitchedSystem,
};

use faer::c64;

use crate::error::{HallError, Result};
use crate::lattice::{LatticeBox, SitePoint};

/// Set of sites over which a diagonal trace is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceWindow {
    /// 1-norm ball of the given radius about a (possibly dual-lattice) point.
    Ball { center: SitePoint, radius: i64 },
    /// Every site of the box.
    Full,
    /// Rows `x2 < cut`.
    RowsBelow(i64),
}

impl TraceWindow {
    /// Ball about the crossing `(−1/2, −1/2)` of the two switch lines.
    pub fn at_crossing(radius: i64) -> Self {
        TraceWindow::Ball {
            center: SitePoint::plaquette(-1, -1),
            radius,
        }
    }

    pub fn grown(&self, by: i64) -> Option<Self> {
        match *self {
            TraceWindow::Ball { center, radius } => Some(TraceWindow::Ball {
                center,
                radius: radius + by,
            }),
            _ => None,
        }
    }

    pub fn sites(&self, bx: &LatticeBox) -> Result<Vec<usize>> {
        let out: Vec<usize> = match *self {
            TraceWindow::Full => (0..bx.n_sites()).collect(),
            TraceWindow::RowsBelow(cut) => {
                (0..bx.n_sites()).filter(|&k| bx.site(k).1 < cut).collect()
            }
            TraceWindow::Ball { center, radius } => {
                if radius < 0 {
                    return Err(HallError::Window(format!("negative radius {radius}")));
                }
                let c1 = center.tx1.div_euclid(2);
                let c2 = center.tx2.div_euclid(2);
                let mut out = Vec::new();
                for x2 in c2 - radius - 1..=c2 + radius + 1 {
                    for x1 in c1 - radius - 1..=c1 + radius + 1 {
                        if center.twice_dist1(x1, x2) <= 2 * radius {
                            match bx.index(x1, x2) {
                                Some(k) => out.push(k),
                                None => {
                                    return Err(HallError::Window(format!(
                                        "site ({x1},{x2}) of the radius-{radius} ball leaves {bx:?}"
                                    )))
                                }
                            }
                        }
                    }
                }
                out.sort_unstable();
                out
            }
        };
        if out.is_empty() {
            return Err(HallError::Window(format!(
                "{self:?} selects no site of {bx:?}"
            )));
        }
        Ok(out)
    }

    pub fn fits(&self, bx: &LatticeBox) -> bool {
        self.sites(bx).is_ok()
    }
}

/// A conductance value with its numerical diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceReport {
    pub value: f64,
    pub window: TraceWindow,
    pub bx: LatticeBox,
    /// Imaginary part discarded from the trace.
    pub imag_residual: f64,
    /// |trace over the whole box|, where that trace must vanish.
    pub full_trace_residual: Option<f64>,
    /// |value(W) − value(W+4)| when the larger window fits.
    pub window_sensitivity: Option<f64>,
    pub parameters: Vec<(&'static str, f64)>,
    pub components: Vec<(&'static str, f64)>,
}

impl ConductanceReport {
    pub(crate) fn new(value: f64, window: TraceWindow, bx: LatticeBox) -> Self {
        Self {
            value,
            window,
            bx,
            imag_residual: 0.0,
            full_trace_residual: None,
            window_sensitivity: None,
            parameters: Vec::new(),
            components: Vec::new(),
        }
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|c| c.0 == name).map(|c| c.1)
    }
}

pub(crate) fn window_sum(diag: &[c64], sites: &[usize]) -> c64 {
    sites.iter().map(|&k| diag[k]).sum()
}
