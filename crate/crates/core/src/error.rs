use thiserror::Error;

use crate::scheme::LagrangianState;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates a constraint. `key` names the offending
    /// parameter so front-ends can report it.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    #[error("invalid initial data: {0}")]
    InitialData(String),

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The time-stepper produced a non-finite value. The last finite state is
    /// kept for post-mortem inspection.
    #[error("numerical abort at step {step}: {reason}")]
    NumericalAbort {
        step: usize,
        reason: String,
        snapshot: Box<LagrangianState>,
    },

    #[error("reference solver lost monotonicity at step {step} (x-cell {cell})")]
    MonotonicityLost { step: usize, cell: usize },

    #[error("advective CFL violated: h_ref = {h_ref:e} exceeds {limit:e}")]
    Cfl { h_ref: f64, limit: f64 },

    #[error("mismatched horizons: requested t = {t}, available up to {available}")]
    Horizon { t: f64, available: f64 },
}

impl Error {
    pub(crate) fn config(key: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            key,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
