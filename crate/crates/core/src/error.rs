use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no hyperedges")]
    EmptyInput,

    #[error("filtering left no hyperedges (max size {max_size})")]
    EmptyResult { max_size: usize },

    #[error("capacity guard: {what} needs {needed} entries, budget is {budget}")]
    Capacity { what: &'static str, needed: u128, budget: u128 },

    #[error("unsafe coefficient range: min |b| = {b_min:e} with r = {r} underflows to subnormal")]
    NumericRange { b_min: f64, r: usize },

    #[error("hypergraph not connected")]
    NotConnected,

    #[error("{method} did not converge after {iterations} iterations ({detail})")]
    NoConvergence { method: &'static str, iterations: usize, detail: String },

    #[error("optimization diverged at step {step}: objective {objective}")]
    Divergence { step: usize, objective: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fixture corrupted: {0}")]
    FixtureCorrupt(String),

    #[error("computation cancelled")]
    Cancelled,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
