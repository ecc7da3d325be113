use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse failure class. The CLI maps these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration: unknown names, invalid parameter values.
    Config,
    /// Data that violates a contract: shapes, non-finite values, degenerate labels.
    Data,
    /// The algorithm itself failed: infeasible constraints, numerical breakdown.
    Algorithm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    NonFinite {
        what: String,
        row: usize,
        col: usize,
    },
    EmptyLabeledSet,
    DegenerateLabels(String),
    InvalidData(String),
    UnknownAlgorithm(String),
    UnknownTransformer(String),
    UnknownParameter {
        owner: String,
        name: String,
    },
    InvalidParameter {
        name: String,
        reason: String,
    },
    Unsupported(String),
    Infeasible(String),
    Numerical(String),
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
    },
    /// An error raised inside a named pipeline step.
    Step {
        step: String,
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnknownAlgorithm(_)
            | Error::UnknownTransformer(_)
            | Error::UnknownParameter { .. }
            | Error::InvalidParameter { .. } => ErrorKind::Config,
            Error::DimensionMismatch { .. }
            | Error::NonFinite { .. }
            | Error::EmptyLabeledSet
            | Error::DegenerateLabels(_)
            | Error::InvalidData(_) => ErrorKind::Data,
            Error::Unsupported(_)
            | Error::Infeasible(_)
            | Error::Numerical(_)
            | Error::NonFiniteLoss { .. } => ErrorKind::Algorithm,
            Error::Step { source, .. } => source.kind(),
        }
    }

    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(what: &str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what} mismatch: expected {expected}, found {found}"),
            Error::NonFinite { what, row, col } => {
                write!(f, "non-finite value in {what} at ({row}, {col})")
            }
            Error::EmptyLabeledSet => f.write_str("empty labeled set"),
            Error::DegenerateLabels(msg) => write!(f, "degenerate labeled set: {msg}"),
            Error::InvalidData(msg) => write!(f, "invalid data: {msg}"),
            Error::UnknownAlgorithm(name) => write!(f, "unknown algorithm `{name}`"),
            Error::UnknownTransformer(name) => write!(f, "unknown transformer `{name}`"),
            Error::UnknownParameter { owner, name } => {
                write!(f, "unknown parameter `{name}` for `{owner}`")
            }
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::Unsupported(msg) => write!(f, "unsupported input: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::NonFiniteLoss { epoch, batch } => {
                write!(f, "non-finite loss at epoch {epoch}, batch {batch}")
            }
            Error::Step { step, source } => write!(f, "pipeline step `{step}`: {source}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
