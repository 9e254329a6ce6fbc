use thiserror::Error;
use wirecut::channels::ChannelError;
use wirecut::clifford::CliffordError;
use wirecut::cutting::CutError;
use wirecut::qaoa::QaoaError;
use wirecut::sim::SimError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for broken numerical invariants, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Numerical(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> BenchError {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

fn classify(numerical: bool, msg: String) -> BenchError {
    if numerical {
        BenchError::Numerical(msg)
    } else {
        BenchError::Validation(msg)
    }
}

impl From<SimError> for BenchError {
    fn from(e: SimError) -> Self {
        classify(e.is_numerical(), e.to_string())
    }
}

impl From<CutError> for BenchError {
    fn from(e: CutError) -> Self {
        classify(e.is_numerical(), e.to_string())
    }
}

impl From<QaoaError> for BenchError {
    fn from(e: QaoaError) -> Self {
        classify(e.is_numerical(), e.to_string())
    }
}

impl From<ChannelError> for BenchError {
    fn from(e: ChannelError) -> Self {
        BenchError::Validation(e.to_string())
    }
}

impl From<CliffordError> for BenchError {
    fn from(e: CliffordError) -> Self {
        BenchError::Validation(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
