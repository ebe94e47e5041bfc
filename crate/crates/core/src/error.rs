use std::fmt;

use thiserror::Error;

/// Which side of a band a missing crossing belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandEdge {
    Lower,
    Upper,
}

impl fmt::Display for BandEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandEdge::Lower => f.write_str("lower"),
            BandEdge::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} is singular at {freq_hz} Hz")]
    Singular { what: &'static str, freq_hz: f64 },

    #[error("port mismatch: cannot feed a {from:?} output into a {to:?} input")]
    PortMismatch {
        from: crate::twoport::Domain,
        to: crate::twoport::Domain,
    },

    #[error("{edge} band edge has no crossing inside the frequency grid")]
    BandUnbounded { edge: BandEdge },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("noise power is zero over the band, SNR is unbounded")]
    InfiniteSnr,

    #[error("reference cell {0:?} is invalid")]
    InvalidReference([usize; 3]),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by evaluating the model at a singular point.
    pub fn is_singular(&self) -> bool {
        matches!(self, Error::Singular { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {value}")))
    }
}
