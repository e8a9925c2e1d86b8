use thiserror::Error;

/// Errors raised by the spectral toolkit.
///
/// Every variant is a precondition or numerical-health failure; callers
/// that drive batch runs map all of them to the same exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("unknown potential preset `{0}`")]
    UnknownPreset(String),

    #[error("unknown multiplier kind `{0}`")]
    UnknownMultiplier(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected {expected} samples, got {actual}")]
    GridMismatch { expected: usize, actual: usize },

    #[error("grid [{x_min}, {x_max}] does not contain the potential support radius {support_radius} with margin")]
    GridTooNarrow {
        x_min: f64,
        x_max: f64,
        support_radius: f64,
    },

    #[error("ODE integration failed at x = {x}: {reason}")]
    Integration { x: f64, reason: String },

    #[error("exceptional frequency xi = {xi}: |W| = {wronskian_abs} below threshold")]
    ExceptionalFrequency { xi: f64, wronskian_abs: f64 },

    #[error("every frequency column is masked as exceptional")]
    AllMasked,

    #[error("bound-state tail not decayed at the window edge (ratio {tail_ratio:.3e}); widen the grid")]
    GridMarginInsufficient { tail_ratio: f64 },

    #[error("near-degenerate bound states at lambda = {lambda} (gap {gap:.3e})")]
    DegenerateSpectrum { lambda: f64, gap: f64 },

    #[error("input not decayed at the window edge: |f| = {edge_value:.3e}")]
    NotDecayed { edge_value: f64 },

    #[error("frequency window not converged: tail magnitude {tail:.3e} at xi_max")]
    FrequencyWindow { tail: f64 },

    #[error("multiplier support rejected: {0}")]
    MultiplierSupport(String),

    #[error("multiplier support under-resolved: {nodes} xi nodes inside, need {required}")]
    UnderResolved { nodes: usize, required: usize },

    #[error("eigensolver failed (info = {0})")]
    Eigensolver(i32),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SpectralError {
    fn from(e: std::io::Error) -> Self {
        SpectralError::Io(e.to_string())
    }
}

impl From<csv::Error> for SpectralError {
    fn from(e: csv::Error) -> Self {
        SpectralError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpectralError>;
