use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("polytope is not full-dimensional (affine dimension {affine_dim} in ambient dimension {dim})")]
    DegeneratePolytope { dim: usize, affine_dim: usize },

    #[error("function is not admissible for the polytope: {0}")]
    NotAdmissible(String),

    #[error("mass mismatch: expected total mass {expected}, found {found}")]
    MassMismatch { expected: Box<Rational>, found: Box<Rational> },

    #[error("measure has nonzero total mass {0}; a Poisson right-hand side must balance")]
    MassBalance(Box<Rational>),

    #[error("negative mass {0} in a positive measure")]
    NegativeMass(Box<Rational>),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid graph function: {0}")]
    InvalidFunction(String),

    #[error("invalid graph point: {0}")]
    InvalidPoint(String),

    #[error("function is not subharmonic with respect to the reference measure")]
    NotSubharmonic,

    #[error("expected {expected} arguments, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operation unsupported in dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
}
