use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HallError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("operator is not hermitian (max |M - M^*| = {0:e})")]
    NonHermitian(f64),
    #[error("box mismatch between operands")]
    BoxMismatch,
    #[error("eigenvalue {eigenvalue} lies within {tol:e} of the cut at {cut}")]
    AmbiguousCut { eigenvalue: f64, cut: f64, tol: f64 },
    #[error("trace window does not fit in the box: {0}")]
    Window(String),
    #[error("no eigenvalue near {0}")]
    EmptyCluster(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("linear solve failed: {0}")]
    Singular(String),
    #[error("insufficient padding: {0}")]
    Padding(String),
}

pub type Result<T> = std::result::Result<T, HallError>;
