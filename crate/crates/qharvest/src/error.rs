//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building states, propagating them, or
/// evaluating measures. Variants are grouped by how the CLI reports them:
/// configuration problems, input validation failures, and physics/numerics
/// failures detected at run time.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix is not Hermitian: max |H - H^dag| = {deviation:.3e} exceeds {limit:.3e}")]
    NotHermitian { deviation: f64, limit: f64 },

    #[error("matrix entries must be finite in {context}")]
    NonFinite { context: &'static str },

    #[error("not a valid density matrix: {reason} (value {value:.3e})")]
    InvalidDensity { reason: &'static str, value: f64 },

    #[error("state vector norm {norm:.12} is not 1 within tolerance")]
    NotNormalized { norm: f64 },

    #[error("truncation leakage {leakage:.3e} exceeds limit {limit:.3e}")]
    TruncationLeakage { leakage: f64, limit: f64 },

    #[error("ensemble weights sum to {sum:.12}, expected 1")]
    WeightSum { sum: f64 },

    #[error("ensemble weight {weight:.3e} is negative")]
    NegativeWeight { weight: f64 },

    #[error("superposition amplitudes have |a|^2 sum {sum_sq:.12}, expected 1")]
    AmplitudeNorm { sum_sq: f64 },

    #[error("too many superposition states: {count} (limit {max})")]
    TooManyStates { count: usize, max: usize },

    #[error("degenerate state: {what}")]
    DegenerateState { what: &'static str },

    #[error(
        "time stepping did not converge: doubling substeps from {substeps} moved a sample by \
         {deviation:.3e} (limit {limit:.3e})"
    )]
    ConvergenceFailure {
        substeps: usize,
        deviation: f64,
        limit: f64,
    },

    #[error("phase-space grids do not match")]
    GridMismatch,

    #[error("argument out of range: {what}")]
    Domain { what: String },

    #[error(
        "grid does not cover the state: normalization error {normalization_error:.3e} exceeds \
         budget {budget:.3e}"
    )]
    Coverage {
        normalization_error: f64,
        budget: f64,
    },

    #[error("invalid specification: {reason}")]
    InvalidSpec { reason: String },

    #[error("consistency check '{check}' failed: deviation {deviation:.3e} exceeds {limit:.3e}")]
    CheckFailed {
        check: &'static str,
        deviation: f64,
        limit: f64,
    },

    #[error("numerical contamination in {what}: {value:.3e} exceeds {limit:.3e}")]
    Numerics {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the CLI: 2 for configuration parse errors,
    /// 3 for validation errors, 4 for physics/numerics failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Dimension { .. }
            | Error::NotHermitian { .. }
            | Error::NonFinite { .. }
            | Error::InvalidDensity { .. }
            | Error::NotNormalized { .. }
            | Error::WeightSum { .. }
            | Error::NegativeWeight { .. }
            | Error::AmplitudeNorm { .. }
            | Error::TooManyStates { .. }
            | Error::DegenerateState { .. }
            | Error::Domain { .. }
            | Error::InvalidSpec { .. } => 3,
            Error::TruncationLeakage { .. }
            | Error::ConvergenceFailure { .. }
            | Error::GridMismatch
            | Error::Coverage { .. }
            | Error::CheckFailed { .. }
            | Error::Numerics { .. } => 4,
        }
    }
}
