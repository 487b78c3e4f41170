use thiserror::Error;

pub type Result<T, E = SpectralError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite sample at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("inverse transform left imaginary residue {residue:e} above tolerance {tolerance:e}; spectrum is not conjugate-symmetric")]
    Symmetry { residue: f64, tolerance: f64 },

    #[error("support box {p}x{q} exceeds {height}x{width}")]
    Bounds {
        p: usize,
        q: usize,
        height: usize,
        width: usize,
    },

    #[error("kernel set is empty")]
    EmptyKernelSet,

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("node {index} ({label}) has no shape metadata")]
    MissingShape { index: usize, label: String },
}

impl SpectralError {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        SpectralError::Dimension(msg.into())
    }
}
