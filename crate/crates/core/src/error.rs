use thiserror::Error;

/// Errors raised by the pricing engine.
#[derive(Debug, Error)]
pub enum LevyError {
    /// A parameter or argument lies outside the domain where the
    /// requested quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The martingale condition cannot be imposed on the model.
    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("toml parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LevyError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LevyError::Domain(msg.into()))
}
