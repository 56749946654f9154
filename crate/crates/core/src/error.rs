use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs outside the domain of an operation (shape mismatches,
    /// out-of-range parameters, invalid states).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("unsupported field GF({p}^{n}): {reason}")]
    UnsupportedField { p: u64, n: u32, reason: String },

    #[error(
        "no built-in complete MUB set for d = {d}; supported: 2, 4, odd primes and odd prime \
         powers up to 169. Use a Fourier pair or import a MUB file instead"
    )]
    UnsupportedDimension { d: usize },

    /// An iterative routine failed to reach its accuracy target.
    #[error("numerical failure: {message} (achieved error estimate {achieved:e})")]
    Numerical { message: String, achieved: f64 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Format(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
