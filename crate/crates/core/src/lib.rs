//! Signatures of Shimura curves over `Q` and real quadratic fields.
//!
//! The crate computes exact areas, elliptic-cycle counts and genera of the
//! curves `X_0^D(N)`, enumerates all curves of genus at most two over base
//! fields of degree one and two, and checks the results against a bundled
//! golden table.

pub mod arith;
pub mod cmorders;
pub mod curves;
pub mod embeddings;
pub mod enumerate;
pub mod quadfield;
pub mod tables;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NonFundamentalDiscriminant(i64),
    #[error("{0} is negative; the base field must be totally real")]
    NotTotallyReal(i64),
    #[error("q = {q} is not admissible for d_F = {d_f}")]
    NotAdmissible { d_f: i64, q: u32 },
    #[error("ideal {0} is not squarefree")]
    NotSquarefree(String),
    #[error("discriminant {0} and level {1} are not coprime")]
    NotCoprime(String, String),
    #[error("discriminant {disc} violates the parity condition over a field of degree {degree}")]
    ParityViolation { disc: String, degree: u8 },
    #[error("non-integral class number {value} for order of conductor {conductor}")]
    NonIntegralClassNumber { value: String, conductor: String },
    #[error("non-integral elliptic count {value} for q = {q}")]
    NonIntegralCount { q: u32, value: String },
    #[error("unit index search inconclusive for d_F = {d_f}, q = {q}, conductor {conductor}")]
    UnitSearchInconclusive { d_f: i64, q: u32, conductor: String },
    #[error("precision {have} too low at {prime}, need {need}")]
    PrecisionTooLow { prime: String, have: u32, need: u32 },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("ambiguous ideal: candidates {0:?}")]
    AmbiguousIdeal(Vec<String>),
    #[error("no ideal matches: {0}")]
    NotFound(String),
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("row count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad user input rather than a bug.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonFundamentalDiscriminant(_)
                | Error::NotTotallyReal(_)
                | Error::NotAdmissible { .. }
                | Error::NotSquarefree(_)
                | Error::NotCoprime(..)
                | Error::ParityViolation { .. }
                | Error::AmbiguousIdeal(_)
                | Error::NotFound(_)
                | Error::ParseError { .. }
                | Error::InvalidInput(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
