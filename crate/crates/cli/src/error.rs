use std::io;

use thiserror::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_DIAGONALIZABLE: i32 = 3;
pub const EXIT_METHOD_MISMATCH: i32 = 4;
pub const EXIT_VERIFICATION_FAILED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}\nhint: `subwave evolve --method ode` integrates directly and works at any θ")]
    NotDiagonalizable(subwave_core::Error),

    #[error("eigen and ODE evolution disagree: max amplitude deviation {deviation:.3e} > {tolerance:.0e}")]
    MethodMismatch { deviation: f64, tolerance: f64 },

    #[error("verification failed: {}", failed.join(", "))]
    VerificationFailed { failed: Vec<String> },

    #[error(transparent)]
    Core(subwave_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::NotDiagonalizable(_) => EXIT_NOT_DIAGONALIZABLE,
            CliError::MethodMismatch { .. } => EXIT_METHOD_MISMATCH,
            CliError::VerificationFailed { .. } => EXIT_VERIFICATION_FAILED,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<subwave_core::Error> for CliError {
    fn from(e: subwave_core::Error) -> Self {
        use subwave_core::Error as E;
        match e {
            E::NotDiagonalizable { .. } | E::IllConditioned { .. } => {
                CliError::NotDiagonalizable(e)
            }
            E::InvalidConfig(_)
            | E::InvalidState(_)
            | E::InvalidTimes(_)
            | E::NoSuchState(_)
            | E::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            other => CliError::Core(other),
        }
    }
}
