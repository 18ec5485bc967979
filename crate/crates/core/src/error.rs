use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation discards norm {discarded:.3e} (limit {limit:.0e}); raise the cutoff")]
    CutoffTooSmall { discarded: f64, limit: f64 },

    #[error("odd cat state with zero amplitude has no normalization")]
    DegenerateCat,

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    #[error("invalid cutoff {cutoff} for mode `{label}`")]
    InvalidCutoff { label: String, cutoff: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cutoff mismatch between modes `{0}` and `{1}`")]
    CutoffMismatch(String, String),

    #[error("operation needs a single-mode state, got {0} modes")]
    MultiMode(usize),

    #[error("conditional event has zero probability")]
    ZeroProbability,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing conditional tomogram for polarization {0}")]
    MissingProjection(&'static str),

    #[error("fidelity lower bound {0} exceeds one")]
    NonPhysicalBound(f64),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Configuration problems as opposed to numerical failures.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
