use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] drsub_core::Error),
}

impl BenchError {
    /// 2 for configuration problems, 3 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Io(_) | BenchError::Output(_) => 3,
            BenchError::Core(drsub_core::Error::Io(_)) => 3,
            BenchError::Core(drsub_core::Error::Parse { .. }) => 2,
            BenchError::Core(drsub_core::Error::InvalidArgument(_)) => 2,
            BenchError::Core(drsub_core::Error::Infeasible(_)) => 2,
            BenchError::Core(drsub_core::Error::UnsupportedLiftedBody(_)) => 2,
            BenchError::Core(_) => 1,
        }
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for BenchError {
    fn from(e: serde_json::Error) -> Self {
        BenchError::Output(e.to_string())
    }
}

pub type BenchResult<T> = Result<T, BenchError>;
