use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate scene: tr(Z Zᴴ) = 0")]
    DegenerateScene,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    /// The statistic is +∞ (e.g. received data exactly collinear with `Z`).
    #[error("statistic overflow: {0}")]
    Overflow(String),

    #[error("covariance is not positive definite (eigenvalues {lambda1:e}, {lambda2:e})")]
    NumericalDegeneracy { lambda1: f64, lambda2: f64 },

    #[error("numerical failure: {what} (estimate {estimate:e}, error {error:e}, evaluations {evaluations})")]
    NumericalFailure {
        what: String,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("enumeration refused: {entries} entries exceeds the limit of {limit} (4^N patterns)")]
    TooLarge { entries: usize, limit: usize },

    #[error("cannot allocate {0}")]
    OutOfMemory(String),

    #[error("out of resources after {completed} of {requested} trials")]
    PartialResults { completed: usize, requested: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DegenerateScene => "degenerate-scene",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::NumericalDomain(_) => "numerical-domain",
            Error::Overflow(_) => "overflow",
            Error::NumericalDegeneracy { .. } => "numerical-degeneracy",
            Error::NumericalFailure { .. } => "numerical-failure",
            Error::TooLarge { .. } => "too-large",
            Error::PartialResults { .. } => "partial-results",
            Error::OutOfMemory(_) => "out-of-memory",
        }
    }
}
