use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("threshold search did not converge in [{lo_db}, {hi_db}] dB")]
    NoConvergence { lo_db: f64, hi_db: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
