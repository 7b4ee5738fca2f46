use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlmError {
    #[error("invalid search box: {0}")]
    InvalidBox(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("objective returned non-finite value {value} at {point:?}")]
    NonFiniteObjective { point: Vec<f64>, value: f64 },

    #[error("generation {generation}: {source}")]
    AtGeneration {
        generation: usize,
        #[source]
        source: Box<SlmError>,
    },

    #[error("unknown objective '{name}' (available: {})", available.join(", "))]
    UnknownObjective { name: String, available: Vec<String> },

    #[error("shekel coefficient index {0} out of range 0..=24")]
    ShekelIndex(usize),

    #[error("rendering supports only 2-D generations, got dimension {0}")]
    UnsupportedDimension(usize),
}

pub type Result<T> = std::result::Result<T, SlmError>;
