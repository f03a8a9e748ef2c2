//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by geometry, solver, sampling and harness operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point of the wrong kind (or wrong dimension) was passed to a space.
    #[error("point/space mismatch: space {space} cannot operate on {point}")]
    PointSpaceMismatch {
        space: &'static str,
        point: &'static str,
    },

    /// Geodesic between the given points is not unique (e.g. antipodal
    /// points on the sphere), so interpolation is refused.
    #[error("no unique geodesic: {0}")]
    NoUniqueGeodesic(String),

    /// A matrix expected to be symmetric positive definite is not.
    #[error("not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    /// The operation is not available on this space.
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    /// A block estimator failed inside `boost`; carries the block index.
    #[error("base estimator failed on block {block}: {source}")]
    BlockEstimator {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    /// Experiment configuration rejected before any replication ran.
    #[error("invalid config: {0}")]
    Config(String),

    /// File I/O failure, with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
