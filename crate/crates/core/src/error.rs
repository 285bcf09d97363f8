use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse {input:?} as an exact rational")]
    Parse { input: String },

    #[error("degenerate affine map (scale is zero)")]
    DegenerateAffineMap,

    #[error("empty interval {0}")]
    EmptyInterval(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid sensing vector: {0}")]
    InvalidSensingVector(String),

    #[error("inconsistent observation: position {position} is outside prior {prior}")]
    InconsistentObservation { position: String, prior: String },

    #[error("split into {parts} cells exceeds sensor capability ({max} cells)")]
    ExceedsSensorCapability { parts: u64, max: u64 },

    #[error("invalid strategy word {input:?}: {reason}")]
    InvalidStrategy { input: String, reason: String },

    #[error("initial I-state size {size} is outside [{lo}, {hi}]")]
    InitialSizeOutOfBounds {
        size: String,
        lo: String,
        hi: String,
    },

    #[error("not a boundary problem")]
    NotBoundary,

    #[error("initial I-state infeasible: size {0} has no privacy-preserving tracking strategy")]
    InitialStateInfeasible(String),

    #[error("impossibility zone {index} is not a single interval inside one partition cell")]
    ZoneNotSimple { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
