use thiserror::Error;

/// Errors raised by the checkers, propagators and front ends.
///
/// Inconsistency is *not* an error: checkers report it as a verdict and
/// propagators as [`crate::propagators::Outcome::Failure`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic overflow")]
    Overflow,

    #[error("constraint `{0}` has no real interpretation")]
    RealSemanticsUndefined(String),

    #[error("valuation binds a non-integral value to variable {0}")]
    NonIntegral(usize),

    #[error("arity mismatch: expected {expected} bindings, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("every variable is already fixed; nothing to branch on")]
    AllFixed,

    #[error("enumeration budget of {0} tuples exceeded")]
    BudgetExceeded(u64),

    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
