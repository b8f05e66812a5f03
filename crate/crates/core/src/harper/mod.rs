//! Resolvent traces of the Harper model, the disorder-averaged edge current
//! density `j_B(λ)` and its large-energy expansion.

mod asymptotics;
mod monte_carlo;
mod resolvent;

pub use asymptotics::{
    expected_jb_integral, j_b, leading_asymptotic, neumann_leading_asymptotic, neumann_term,
    neumann_term_on, JbIntegral, HARPER_NORM_BOUND,
};
pub use monte_carlo::{disorder_average_trace, jackknife_mean, MonteCarloEstimate};
pub use resolvent::{
    resolvent_trace, t_b_trace, t_phi_trace, t_phi_trace_checked, t_phi_trace_dense,
    ResolventTraceResult,
};

pub use crate::quadrature::QuadratureRule;
