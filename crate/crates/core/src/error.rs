use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("trajectories use different time nodes")]
    TimeGridMismatch,

    #[error("symbol is singular at xi = 0 but the input has nonzero mean (|f_hat(0)| = {mean:e})")]
    ZeroModeSingular { mean: f64 },

    #[error("window family is empty")]
    EmptyWindowFamily,

    #[error("no window radius below T = {0}")]
    NoWindowBelowT(f64),

    #[error("alpha = {0} outside the admissible range")]
    AlphaOutOfRange(f64),

    #[error("unknown functional kind `{0}`")]
    UnknownKind(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("trajectory has no slices")]
    EmptyTrajectory,

    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("denominator vanishes")]
    ZeroDenominator,

    #[error("field is identically zero")]
    ZeroField,

    #[error("non-finite values in iterate {iteration}")]
    NumericalBlowup { iteration: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 for numerical failures, 2 for invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalBlowup { .. }
            | Error::ZeroDenominator
            | Error::ZeroField
            | Error::NonPositiveArgument(_) => 1,
            _ => 2,
        }
    }
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
