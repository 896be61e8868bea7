use thiserror::Error;

/// Errors surfaced by model validation, operator algebra and the flow simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("H not self-adjoint (defect {defect:.3e}, tolerance {tol:.1e})")]
    NonHermitian { defect: f64, tol: f64 },

    #[error("negative time t = {t}")]
    NegativeTime { t: f64 },

    #[error("invalid step size dt = {dt}")]
    InvalidStep { dt: f64 },

    #[error("slot count {n_slots} exceeds configured maximum {max_slots}")]
    TooManySlots { n_slots: usize, max_slots: usize },

    #[error("memory cap exceeded: required {required} complex entries, cap {cap}")]
    MemoryCap { required: usize, cap: usize },

    #[error("slot range {start}..{end} does not fit in 0..{n_slots}")]
    SlotRange {
        start: usize,
        end: usize,
        n_slots: usize,
    },

    #[error("noise dimension mismatch: original {orig}, reconstructed {rec}")]
    NoiseDimMismatch { orig: usize, rec: usize },

    #[error("iteration failed to converge in {context} after {iterations} steps")]
    NoConvergence {
        context: &'static str,
        iterations: usize,
    },

    #[error("singular matrix in {context}")]
    Singular { context: &'static str },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
