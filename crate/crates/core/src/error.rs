use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside the admissible domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error("invalid spline space: {0}")]
    InvalidSpace(String),

    #[error("coefficient length {got} does not match space dimension {expected}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("degenerate geometry in patch {patch}: {reason}")]
    DegenerateGeometry { patch: usize, reason: String },

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("interface {index} failed verification: mismatch {mismatch:.3e} at face point {at:?}")]
    InterfaceMismatch {
        index: usize,
        mismatch: f64,
        at: Vec<f64>,
    },

    #[error("patches {0} and {1} overlap")]
    Overlap(usize, usize),

    #[error("non-positive diffusion coefficient {value} on patch {patch}")]
    NonPositiveAlpha { patch: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid index {index} (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("rate undefined for non-positive error {0}")]
    UndefinedRate(f64),

    #[error(transparent)]
    Solver(#[from] crate::solver::SolveError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(value: f64, domain: &'static str) -> Self {
        Error::Domain { value, domain }
    }
}
