use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not PSD: eigenvalue {eigenvalue:.3e} below tolerance")]
    NotPsd { eigenvalue: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid measurement model: {0}")]
    InvalidModel(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("post-selection starvation: all {discarded} of {shots} shots discarded")]
    PostSelectionStarvation { shots: u64, discarded: u64 },

    #[error("divisor underflow: {0}")]
    DivisorUnderflow(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line surface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PostSelectionStarvation { .. } => 3,
            Error::NotPsd { .. }
            | Error::DivisorUnderflow(_)
            | Error::IllConditioned(_)
            | Error::NotHermitian { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
