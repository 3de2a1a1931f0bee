use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{n} qubits exceeds the dense limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("state is not product across the partition at t = {time}: block {block:?} has purity {purity}")]
    NotProduct { time: f64, block: Vec<usize>, purity: f64 },
    #[error("rate {0} is outside (0, 1]")]
    RateOutOfRange(f64),
    #[error("specification error: {0}")]
    Spec(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Spec(e.to_string())
    }
}
