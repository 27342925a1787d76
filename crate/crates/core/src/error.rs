use thiserror::Error;

/// Errors raised by the numerical routines and parsers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain of {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} has a pole at {at}")]
    Pole { func: &'static str, at: String },

    #[error("{what} did not converge within {limit} terms/nodes")]
    NonConvergence { what: &'static str, limit: usize },

    #[error("state cap {cap} too small for {what}: need at least {needed}")]
    CapInsufficient {
        what: &'static str,
        cap: usize,
        needed: usize,
    },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("floating-point overflow in {0}")]
    Overflow(&'static str),

    #[error("imaginary residue {residue:e} in {what} exceeds guard")]
    ImaginaryResidue { what: &'static str, residue: f64 },

    #[error("boundary weights are not summable: {0}")]
    Divergent(String),

    #[error("accuracy loss in {func}: {detail}")]
    AccuracyLoss { func: &'static str, detail: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by numerical guards (caps, convergence,
    /// overflow) rather than by bad input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::CapInsufficient { .. }
                | Error::Overflow(_)
                | Error::ImaginaryResidue { .. }
                | Error::AccuracyLoss { .. }
                | Error::SizeGuard(_)
                | Error::Divergent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
