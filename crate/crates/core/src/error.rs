//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, normalization, evaluation and bound computation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset} (only `n` is allowed)")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("empty expression")]
    EmptyExpression,

    #[error("sequence index must be >= 1, got {n}")]
    InvalidIndex { n: u64 },

    #[error("division by zero while evaluating term at n = {n}")]
    DivisionByZero { n: u64 },

    #[error("exponent must evaluate to an integer at n = {n}, got {value}")]
    NonIntegerExponent { n: u64, value: String },

    #[error("term at n = {n} exceeds the size budget ({bits} bits > {budget} bits)")]
    TermBudgetExceeded { n: u64, bits: u64, budget: u64 },

    #[error("explicit list has {len} items and no continuation rule, cannot produce term {n}")]
    ListExhausted { n: u64, len: usize },

    #[error("radicand a_{n} must be non-negative, got {value}")]
    NegativeRadicand { n: u64, value: String },

    #[error("radicand a_{n} must be strictly positive here, got 0 (zero-elimination required)")]
    ZeroRadicand { n: u64 },

    #[error("weight b_{n} must be strictly positive, got {value}")]
    InvalidWeight { n: u64, value: String },

    #[error("root index r_{n} must be an integer >= 1, got {value}")]
    InvalidRoot { n: u64, value: String },

    #[error("exponent p_{n} must be strictly positive, got {value}")]
    InvalidPowerExponent { n: u64, value: String },

    #[error("root product overflow while merging zeros at original index {n}")]
    RootProductOverflow { n: u64 },

    #[error("horizon {horizon} exhausted: {reason}")]
    HorizonExhausted { horizon: u64, reason: String },

    #[error("precision {bits} bits is below the minimum of {min}")]
    PrecisionTooLow { bits: usize, min: usize },

    #[error("value left the representable exponent range while {context}")]
    ExponentOverflow { context: String },

    #[error("denesting domain violation: f_{k}(y) <= 0 before peeling layer {k}")]
    DenestDomain { k: usize },

    #[error("denesting index {j} out of range for a depth-{n} table")]
    DenestIndex { j: u64, n: u64 },

    #[error("operation not applicable: {reason}")]
    NotApplicable { reason: String },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("JSON spec error: {0}")]
    Json(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by malformed input text/JSON rather than by evaluation.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::EmptyExpression
                | Error::Json(_)
                | Error::InvalidSpec(_)
                | Error::UnknownBuiltin(_)
        )
    }
}
