use thiserror::Error;

/// Errors raised by the solution pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// `U = 0` makes the Bethe polynomial degenerate; the free-fermion
    /// construction must be used instead.
    #[error("U = 0: use the free-fermion protocol")]
    UseFreeProtocol,

    #[error("equal momenta k1 = k2 (|k1 - k2| = {gap:e}); solution discarded")]
    EqualMomenta { gap: f64 },

    #[error("root finder did not converge after {iterations} iterations (worst scaled residual {worst_residual:e})")]
    NoConvergence { iterations: usize, worst_residual: f64 },

    #[error("spectrum has {found} states, expected {expected}: {detail}")]
    CountMismatch {
        expected: usize,
        found: usize,
        detail: String,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degenerate ground state: E0 = {e0}, E1 = {e1}")]
    Degenerate { e0: f64, e1: f64 },

    #[error("inconsistent solution: energy has imaginary part {imag:e} (real part {real})")]
    ComplexEnergy { real: f64, imag: f64 },

    #[error("state cannot be made real: residual imaginary part {0:e}")]
    ComplexState(f64),

    #[error("capacity exceeded for {what}: required {required}, limit {limit}")]
    Capacity {
        what: &'static str,
        required: usize,
        limit: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("folding left off-diagonal entry {value:e} at ({row}, {col})")]
    Compilation { row: usize, col: usize, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by the caller's inputs rather than by the
    /// numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::UseFreeProtocol
                | Error::Unsupported(_)
                | Error::Capacity { .. }
                | Error::Contract(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
