//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument was outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Distribution construction failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Target risk profile construction or use failed validation.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// Risk family specification failed validation.
    #[error("invalid family spec: {0}")]
    InvalidFamily(String),

    /// An operation's precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A value fell outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The family/profile levels do not line up as required.
    #[error("level mismatch: {0}")]
    LevelMismatch(String),

    /// The family is not ordered on the evaluation grid.
    #[error("family not ordered: rho_{p} = {rho_p} > rho_{q} = {rho_q}")]
    NotOrdered {
        p: f64,
        q: f64,
        rho_p: String,
        rho_q: String,
    },

    /// Problem size exceeds the configured desk-scale cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Input data failed parsing, with row context where available.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Backtest configuration is inconsistent with the data.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
