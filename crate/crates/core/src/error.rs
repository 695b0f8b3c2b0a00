use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("regularization parameter must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear system is singular to working precision")]
    SingularSystem,
    #[error("noise level must be positive for this coordination rule, got {0}")]
    DegenerateDelta(f64),
    #[error("invertibility margin q = {0} is outside [0, 1)")]
    QOutOfRange(f64),
    #[error("baseline window {window} holds fewer than two samples (h = {h})")]
    WindowTooNarrow { window: f64, h: f64 },
    #[error("selection Gram determinant {det:e} below tolerance {tol:e}")]
    DegenerateGram { det: f64, tol: f64 },
    #[error("z/psi biorthogonality violated by {max_dev:e}")]
    BiorthogonalityFailed { max_dev: f64 },
    #[error("unknown example id {0}")]
    UnknownExample(u32),
    #[error("least-squares factorization failed")]
    LeastSquaresFailed,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Non-fatal conditions attached to an otherwise valid result.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Warning {
    /// The exponential kernel decays faster than one grid step.
    AlphaTooSmall { alpha: f64, h: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::AlphaTooSmall { alpha, h } => {
                write!(f, "alpha = {alpha} is below the grid step h = {h}; kernel unresolved")
            }
        }
    }
}
