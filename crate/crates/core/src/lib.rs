//! Bulk and edge Hall conductances of lattice Hamiltonians in finite volume.
//!
//! The crate works on rectangular boxes of ℤ² with dense operators. Traces that
//! vanish identically in finite dimension are evaluated on windows around the
//! crossing of the two switch lines.

pub mod conductance;
pub mod error;
pub mod harper;
pub mod lattice;
pub mod operators;
pub mod quadrature;
pub mod spectral;
pub mod topology;

pub use error::{HallError, Result};
pub use faer::{c64, Mat};
pub use lattice::{
    make_box, oriented_area, sight_angle, switch_function, switch_pair, Axis, DiagonalOperator,
    LatticeBox, SitePoint,
};
pub use operators::{
    commutator_switch, harper_hamiltonian, DisorderConfig, EdgeGeometry, LatticeOperator,
};
pub use quadrature::QuadratureRule;
pub use spectral::{eigendecompose, EnergySet, SmoothStep, Spectrum, StepShape};

/// Pin dense kernels to one thread so that results do not depend on the
/// machine; callers parallelize over independent tasks instead.
pub fn init_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}
