//! Error taxonomy shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shock data contradicts the requested wave family.
    #[error("admissibility error: {0}")]
    Admissibility(String),

    /// A structural hypothesis on the reduced potential fails numerically.
    #[error("hypothesis error: {0}")]
    Hypothesis(String),

    /// Root bracketing failed (target value never reached).
    #[error("bracket error: {0}")]
    Bracket(String),

    /// Trajectory left the guard box around the invariant region.
    #[error("blowup at tau={tau}: |u|+|w| exceeded guard (u={u}, w={w})")]
    Blowup { tau: f64, u: f64, w: f64 },

    /// Adaptive step size collapsed below the resolvable scale.
    #[error("step underflow at tau={tau}: h={h}")]
    StepUnderflow { tau: f64, h: f64 },

    /// Integration budget exhausted before reaching the stop energy.
    #[error("no convergence within tau budget {tau}: residual energy {energy}")]
    Nonconvergence { tau: f64, energy: f64 },

    /// Turning-point search for the period integral failed.
    #[error("turning point error: {0}")]
    TurningPoint(String),

    /// Not enough data for a requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Configuration file rejected.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code per the CLI contract: 1 for rejected inputs,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Admissibility(_)
            | Error::Hypothesis(_)
            | Error::Config(_)
            | Error::Json(_)
            | Error::Io(_) => 1,
            Error::Bracket(_)
            | Error::Blowup { .. }
            | Error::StepUnderflow { .. }
            | Error::Nonconvergence { .. }
            | Error::TurningPoint(_)
            | Error::InsufficientData(_) => 2,
        }
    }
}
