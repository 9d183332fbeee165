//! Error types shared across the crate.

use thiserror::Error;

/// Errors from Mittag-Leffler evaluation.
#[derive(Debug, Clone, Error)]
pub enum MlError {
    /// The power series did not reach the stopping rule within the term cap;
    /// the argument is too large for the series regime.
    #[error("series did not converge within {terms} terms (|z| = {abs_z:.3e} too large for the series regime)")]
    SeriesNonConvergence { terms: usize, abs_z: f64 },
    /// The asymptotic expansion was requested outside its sector of validity.
    #[error("argument outside the asymptotic sector: |arg z| = {arg:.6} exceeds beta*pi/2 = {limit:.6}")]
    SectorViolation { arg: f64, limit: f64 },
    /// Invalid order parameters.
    #[error("invalid Mittag-Leffler order: {0}")]
    InvalidOrder(String),
}

/// Errors from grid and field operations.
#[derive(Debug, Clone, Error)]
pub enum FieldError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("frequency band [{lo:.6e}, {hi:.6e}] carries only {modes} grid modes (need >= {need})")]
    BandUnresolved {
        lo: f64,
        hi: f64,
        modes: usize,
        need: usize,
    },
    #[error("parse error in field data: {0}")]
    Parse(String),
}

/// Errors from parameter construction.
#[derive(Debug, Clone, Error)]
pub enum ParamError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// Errors from the integral-equation solver.
#[derive(Debug, Clone, Error)]
pub enum SolverError {
    /// Fixed-point iteration failed to contract. Carries the per-iteration
    /// history of the combined norm and of the residual so the caller can see
    /// whether the iteration diverged or merely stalled.
    #[error("fixed-point iteration did not converge ({iterations} iterations, last residual {last_residual:.3e})")]
    NonConvergence {
        iterations: usize,
        last_residual: f64,
        lambda_history: Vec<f64>,
        residual_history: Vec<f64>,
    },
    #[error("invalid time mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("scaling factor must be positive, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Errors from the frequency-growth experiments.
#[derive(Debug, Clone, Error)]
pub enum IllposedError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("asymptotic regime not reached: t^beta N^alpha = {value:.3e} < {cutoff:.3e}")]
    RegimeNotReached { value: f64, cutoff: f64 },
    #[error("regression needs at least {need} valid band scales, got {got}")]
    RegressionDegenerate { need: usize, got: usize },
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
}

/// Errors surfaced by the configuration-driven entry point.
#[derive(Debug, Error)]
pub enum RunError {
    /// Configuration failed validation; `path` locates the offending field.
    #[error("config validation failed at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("{0}")]
    Other(String),
}

impl RunError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        RunError::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for validation problems, 3 for numerical
    /// non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation { .. } => 2,
            RunError::NonConvergence(_) => 3,
            _ => 1,
        }
    }
}

impl From<SolverError> for RunError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NonConvergence { .. } => RunError::NonConvergence(e.to_string()),
            other => RunError::Other(other.to_string()),
        }
    }
}

impl From<IllposedError> for RunError {
    fn from(e: IllposedError) -> Self {
        RunError::Other(e.to_string())
    }
}

impl From<FieldError> for RunError {
    fn from(e: FieldError) -> Self {
        RunError::Other(e.to_string())
    }
}

impl From<ParamError> for RunError {
    fn from(e: ParamError) -> Self {
        RunError::Validation {
            path: "params".into(),
            message: e.to_string(),
        }
    }
}
