use thiserror::Error;

/// Errors raised by the estimates, curve machinery and drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain is unbounded")]
    Unbounded,

    #[error("complex line never meets the boundary")]
    LineMissesBoundary,

    #[error("domain is not declared {0}")]
    ConvexityClass(&'static str),

    #[error("boundary point failed validation: {0}")]
    InvalidBoundaryPoint(String),

    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("curve leaves the domain at parameter {0}")]
    CurveExitsDomain(f64),

    #[error("mesh too coarse: {0}")]
    MeshDisconnected(String),

    #[error("curve endpoints do not match (gap {0:e})")]
    EndpointMismatch(f64),

    #[error("no feasible quasi-geodesic constants: {0}")]
    NoFeasibleConstants(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
