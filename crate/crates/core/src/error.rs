use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// SPD factorization failed or its pivots fell below the conditioning guard.
    #[error("matrix `{0}` is singular or not positive-definite")]
    Singular(&'static str),

    /// The pseudo-measurement noise covariance could not be repaired into an SPD matrix.
    #[error("degenerate linearization: `{0}` is not positive-definite")]
    DegenerateLinearization(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Not enough measurements to form a rank-2 sample covariance.
    #[error("track initialization deferred: need at least 3 distinct measurements, got {0}")]
    InitializationDeferred(usize),

    #[error("measurement {index}: {source}")]
    AtMeasurement {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("chunk {index}: {source}")]
    AtChunk {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("run {run}, step {step}: {source}")]
    AtStep {
        run: usize,
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_measurement(self, index: usize) -> Self {
        Error::AtMeasurement {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_chunk(self, index: usize) -> Self {
        Error::AtChunk {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_step(self, run: usize, step: usize) -> Self {
        Error::AtStep {
            run,
            step,
            source: Box::new(self),
        }
    }

    /// Innermost error with all location context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtMeasurement { source, .. }
            | Error::AtChunk { source, .. }
            | Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
