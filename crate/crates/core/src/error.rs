use thiserror::Error;

/// Errors raised while building or evaluating bracket structures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet mismatch: {0}")]
    JetMismatch(String),

    #[error("division by a jet with zero constant term at base point ({x}, {y})")]
    SingularDivisor { x: f64, y: f64 },

    #[error("derivative of order ({a}, {b}) exceeds jet order {order}")]
    OrderExceeded { a: usize, b: usize, order: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("1 + theta f(alpha r^2) vanishes or changes sign at ({x}, {y})")]
    SingularProfile { x: f64, y: f64 },

    #[error("singular symplectic structure at ({x}, {y})")]
    SingularSymplectic { x: f64, y: f64 },

    #[error("constraint bracket depends on momenta at ({x}, {y}): deviation {deviation:e}")]
    MomentumDependence { x: f64, y: f64, deviation: f64 },

    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),

    #[error("invalid structure constants: {0}")]
    InvalidStructureConstants(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
