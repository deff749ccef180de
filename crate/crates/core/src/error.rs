use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("linear solver failure: {0}")]
    SolverFailure(String),

    /// The factor `1 + k u` dropped below the admissible threshold.
    #[error("degenerate coefficient: min(1 + k u) = {min_value:.3e} <= {threshold}")]
    DegenerateCoefficient { min_value: f64, threshold: f64 },

    #[error("slab {index}: {source}")]
    Slab {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Attach a slab index to a solver error.
    pub fn in_slab(self, index: usize) -> Self {
        match self {
            e @ Error::Slab { .. } => e,
            other => Error::Slab {
                index,
                source: Box::new(other),
            },
        }
    }

    /// Innermost error, looking through slab wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Slab { source, .. } => source.root(),
            other => other,
        }
    }
}
