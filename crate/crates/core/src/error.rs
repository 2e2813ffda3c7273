//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error at line {line}, column {col}: {msg} (expected one of: {})", expected.join(", "))]
    Parse {
        line: usize,
        col: usize,
        msg: String,
        expected: Vec<String>,
    },
    #[error("width mismatch: {0}")]
    WidthMismatch(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("shortcut semantic mismatch {0}")]
    ShortcutMismatch(String),
    #[error("unsound axiom {axiom} in fragment {fragment}")]
    UnsoundAxiom { fragment: String, axiom: String },
    #[error("unknown fragment {0}")]
    UnknownFragment(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("stale match: {0}")]
    StaleMatch(String),
    #[error("derivation step {step} failed: {msg}\nhost: {host}")]
    StepFailed {
        step: usize,
        msg: String,
        host: String,
    },
    #[error("final form mismatch:\n{0}")]
    FinalMismatch(String),
    #[error("refinement relation fails: {0}")]
    RefinementFails(String),
    #[error("τ is not a swap")]
    NotASwap,
    #[error("state cap of {0} exceeded")]
    CapExceeded(usize),
    #[error("io error: {0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
