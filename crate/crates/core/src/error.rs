//! Error types for configuration validation and simulation runs.

use thiserror::Error;

/// A configuration value violated a type invariant.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    /// Dotted key path of the offending field, e.g. `path.radius`.
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Passes when `ok` holds. Callers write the condition in the positive
    /// direction so a NaN field fails it and gets reported.
    pub fn require(
        ok: bool,
        field: impl Into<String>,
        reason: impl Into<String>,
    ) -> Result<(), ConfigError> {
        if ok {
            Ok(())
        } else {
            Err(ConfigError::new(field, reason))
        }
    }
}

/// A closed-loop simulation failed to run to completion.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// The integrated state or a guidance output stopped being finite.
    #[error("non-finite state at t = {t:.3} s: {what}")]
    NonFinite { t: f64, what: &'static str },
}
