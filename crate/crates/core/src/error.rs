use thiserror::Error;

/// Errors raised by integrators, reference solutions and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("method `{method}` is not applicable: {reason}")]
    NotApplicable { method: String, reason: String },

    /// A state component became NaN or infinite. `step` is the index of the
    /// first step whose output was rejected, so `step` states are valid.
    #[error("non-finite state produced at step {step} ({valid_states} valid states)")]
    NonFinite { step: usize, valid_states: usize },

    #[error("overdamped or critically damped oscillator (k/m - gamma^2/4 = {discriminant})")]
    Overdamped { discriminant: f64 },

    #[error("stepsize {coarse} is not an integer multiple of the reference stepsize {reference}")]
    GridMismatch { coarse: f64, reference: f64 },

    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("too few local extrema: found {found}, need at least {needed}")]
    TooFewExtrema { found: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
