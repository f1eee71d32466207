use thiserror::Error;

use crate::decision::OptionId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("spectral efficiency {0} bit/s/Hz overflows the required-power computation")]
    ExponentOverflow(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("option {option} is infeasible for device {device}: no serving Wi-Fi gateway")]
    InfeasibleRoute { device: usize, option: OptionId },

    #[error("scenario configuration error: {0}")]
    Scenario(String),

    #[error("benchmark group missing for device {0}")]
    MissingGroup(usize),

    #[error("undefined comparison: reference delta for the compared run is zero")]
    UndefinedComparison,

    #[error("joint metric needs at least two methods, got {0}")]
    TooFewMethods(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("config field `{field}`: {reason}")]
    ConfigRange { field: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
