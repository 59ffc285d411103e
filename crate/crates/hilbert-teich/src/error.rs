use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point is not interior: functional {facet} evaluates to {value}")]
    NotInterior { facet: usize, value: f64 },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("equal base points")]
    EqualBasePoints,

    #[error("element is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("cannot flip arc {arc}: {reason}")]
    Flip { arc: String, reason: String },

    #[error("invalid slope: {0}")]
    InvalidSlope(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("corner length {value} below rho0 = {rho0} in triangle {triangle}")]
    Corner { triangle: usize, value: f64, rho0: f64 },

    #[error("triangle functional {value} below 2*rho0 in triangle {triangle}")]
    Functional { triangle: usize, value: f64 },

    #[error("bracket did not close before horizon {horizon}: width {width}")]
    Horizon { horizon: f64, width: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
