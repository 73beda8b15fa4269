use thiserror::Error;

/// Errors produced by the analysis, simulation and design routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative routine did not reach its tolerance.
    #[error("numerical failure in {routine}: {detail} (achieved {achieved:e})")]
    NumericalFailure {
        routine: &'static str,
        detail: String,
        achieved: f64,
    },

    /// A scenario file could not be parsed or failed validation.
    #[error("scenario error at {location}: {message}")]
    Scenario { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Process exit codes used by the command-line front end.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    /// Every optimized point was infeasible.
    pub const INFEASIBLE: i32 = 4;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Scenario { .. } => exit::PARSE,
            Error::NumericalFailure { .. } => exit::NUMERICAL,
            Error::Io(_) => exit::OTHER,
        }
    }
}
