//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    /// Instance-document violation with a JSON-path style location.
    #[error("invalid instance at {path}: {message}")]
    Instance { path: String, message: String },

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("point outside the convex hull of the effective domain")]
    OutsideHull {
        /// Separating hyperplane: normal·z ≥ offset on the domain but
        /// normal·x < offset at the queried point.
        normal: crate::coords::RatVec,
        offset: crate::rat::Rat,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no feasible outcome with finite aggregate value")]
    NoFiniteOutcome,

    #[error("input exceeds desk-scale bounds: {0}")]
    DeskScale(String),

    #[error("{0}")]
    Parse(String),
}

impl Error {
    pub fn instance(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Instance {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<crate::rat::ParseRatError> for Error {
    fn from(e: crate::rat::ParseRatError) -> Self {
        Error::Parse(e.to_string())
    }
}
