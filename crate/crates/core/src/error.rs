use thiserror::Error;

/// Errors raised by the model code.
///
/// Variants split into two families: caller mistakes (`Usage`) and numerical
/// failures (`Compute`, `Bracket`, `Fit`, `Calibration`). The CLI maps the first
/// family to exit code 2 and the second to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("compute error: {0}")]
    Compute(String),
    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("fit failed after {iterations} iterations (residual {residual:e}) at {last:?}")]
    Fit {
        iterations: usize,
        residual: f64,
        last: [f64; 2],
    },
    #[error("calibration error: {0}")]
    Calibration(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn compute(msg: impl Into<String>) -> Self {
        Error::Compute(msg.into())
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
