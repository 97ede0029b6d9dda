//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion is not unit length (norm {norm})")]
    InvalidQuaternion { norm: f64 },

    #[error("joint {joint} is behind the camera (depth {depth})")]
    BehindCamera { joint: usize, depth: f64 },

    #[error("silhouette is empty: {0}")]
    EmptySilhouette(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("proposal confidence for joint {joint} is {value}, must lie in (0, 1]")]
    InvalidConfidence { joint: usize, value: f64 },

    #[error("too few training frames: got {got}, need at least {need}")]
    TooFewFrames { got: usize, need: usize },

    #[error("assignment search space has {size:.3e} states, exceeds limit {limit:.3e}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },

    #[error("quadratic form would hold {entries} entries, exceeds limit {limit}")]
    QpTooLarge { entries: usize, limit: usize },

    #[error("residuals are not finite at the initial point")]
    NonFiniteResidual,

    #[error("trust region radius underflowed while recovering from non-finite residuals")]
    TrustRegionUnderflow,

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("corrupt input image {path}: {reason}")]
    CorruptImage { path: String, reason: String },

    #[error("mismatched sequence ids: {0}")]
    SequenceMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;
