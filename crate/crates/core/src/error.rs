use thiserror::Error;

use crate::filter::Variant;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} out of bounds for signal of length {len}")]
    Index { index: usize, len: usize },

    /// A step produced a non-finite weight.
    #[error("numeric divergence at iteration {iteration}")]
    Divergence { iteration: u64 },

    /// The squared-deviation trace left the admissible range.
    #[error("squared deviation {value:e} exceeds abort threshold at iteration {iteration}")]
    TraceAbort { iteration: usize, value: f64 },

    #[error("{variant} at {sparsity}/{n_taps} taps, run {run}: {source}")]
    Trial {
        variant: Variant,
        sparsity: usize,
        n_taps: usize,
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("config syntax: {0}")]
    Syntax(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
