//! Crate-wide error type.

/// Errors produced by configuration, data handling, and the kernels.
#[derive(Debug, thiserror::Error)]
pub enum SarError {
    /// Invalid parameters, scene, or pipeline configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent data (files, spectra, images).
    #[error("data error: {0}")]
    Data(String),

    /// Index outside the valid range.
    #[error("out of range: {0}")]
    Bounds(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SarError>;

impl SarError {
    pub fn config(msg: impl Into<String>) -> Self {
        SarError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        SarError::Data(msg.into())
    }

    pub fn bounds(msg: impl Into<String>) -> Self {
        SarError::Bounds(msg.into())
    }
}
