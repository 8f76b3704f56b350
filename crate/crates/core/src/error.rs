use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("fields live on different grids ({0}x{1} vs {2}x{3})")]
    GridMismatch(usize, usize, usize, usize),

    #[error("coefficient bound violated: {0}")]
    BoundViolation(String),

    #[error("degenerate structure: {0}")]
    Degenerate(String),

    #[error("no admissible root: {0}")]
    NoAdmissibleRoot(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("iteration did not contract after {iterations} steps (last steps {previous:e}, {last:e})")]
    NonContraction { iterations: usize, previous: f64, last: f64 },

    #[error("disc solve at tau={tau} not certified: residual {residual:e}, boundary {boundary:e}, pin {pin:e} after {iterations} iterations")]
    NotCertified { tau: f64, residual: f64, boundary: f64, pin: f64, iterations: usize },

    #[error("input is not a solution: residual {0:e} above gate")]
    NotASolution(f64),

    #[error("maximum principle violation: boundary maximum is zero but interior is not")]
    MaxPrincipleViolation,

    #[error("torus normalization failed: {0}")]
    Normalization(String),

    #[error("linearized and finite-difference tangents disagree: relative gap {gap:e} exceeds {allowed:e}")]
    ModelInconsistency { gap: f64, allowed: f64 },

    #[error("{failed} of {total} discs failed: {first}")]
    SweepFailed { failed: usize, total: usize, first: String },
}
