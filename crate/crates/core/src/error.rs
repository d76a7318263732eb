//! Error type shared by configuration, solvers and file output.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid scenario parameters or config-file syntax.
    #[error("config error: {0}")]
    Config(String),

    /// A pusher produced a non-finite coordinate.
    #[error("instability: non-finite particle state at t = {t}, step {step}, stage {stage}")]
    Instability { t: f64, step: u64, stage: u8 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
