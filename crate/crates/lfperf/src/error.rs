//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violated one of the documented invariants. The message
    /// names the first violated invariant, e.g. `"cc ≥ rc"`.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The fixed-point iteration hit its iteration cap before the occupancy
    /// stabilized. Carries the last iterate for diagnosis.
    #[error("fixed point did not converge after {iterations} iterations (last occupancy {last_occupancy})")]
    NonConvergence {
        iterations: usize,
        last_occupancy: f64,
    },

    /// A model was asked to handle workload distributions outside its scope.
    #[error("unsupported workload: {0}")]
    UnsupportedWorkload(String),

    /// A per-state quantity was requested for a state outside its domain.
    #[error("state out of range: {0}")]
    StateOutOfRange(String),

    /// A numerical routine could not reach its required residual.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Hardware calibration could not produce trustworthy numbers.
    #[error("calibration failed: {0}")]
    Calibration(String),

    /// Configuration file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),
}
