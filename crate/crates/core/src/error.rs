use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge {edge}: weight {weight} is not positive")]
    NonPositiveWeight { edge: usize, weight: f64 },

    #[error("information matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("information matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("mixed block dimensions: expected {expected}, found {found}")]
    MixedBlockDim { expected: usize, found: usize },

    #[error("graph is disconnected: {zero_count} zero eigenvalues, expected {expected}")]
    Disconnected { zero_count: usize, expected: usize },

    #[error("singular spectrum: eigenvalue {value:e} is not positive for p = {p}")]
    SingularSpectrum { value: f64, p: f64 },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("dense information route refused: dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Structural(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by the input data rather than by how the library was called.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Structural(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::InvalidGraph(_)
                | Error::NotPositiveDefinite { .. }
                | Error::NotSymmetric { .. }
                | Error::MixedBlockDim { .. }
                | Error::Disconnected { .. }
                | Error::SingularSpectrum { .. }
                | Error::EmptySpectrum
                | Error::TooLarge { .. }
        )
    }
}
