use std::fmt;

use serde::Serialize;

use crate::seqcore::Mode;

/// Which sign condition on `g` / `Δg` failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignViolationKind {
    SeqVanishes,
    SeqChangesSign,
    DeltaVanishes,
    DeltaChangesSign,
}

impl fmt::Display for SignViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SignViolationKind::SeqVanishes => "sequence vanishes",
            SignViolationKind::SeqChangesSign => "sequence changes sign",
            SignViolationKind::DeltaVanishes => "difference vanishes",
            SignViolationKind::DeltaChangesSign => "difference changes sign",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain [{a}, {b}] is too short (need at least {need} points)")]
    DomainTooShort { a: i64, b: i64, need: usize },

    #[error("domains differ: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(i64, i64, i64, i64),

    #[error("domain must start at 0, starts at {0}")]
    DomainNotAtZero(i64),

    #[error("index {0} is outside the domain")]
    IndexOutOfDomain(i64),

    #[error("divisor vanishes at index {0}")]
    DivisorVanishes(i64),

    #[error("sign violation at index {index}: {kind}")]
    SignViolation { kind: SignViolationKind, index: i64 },

    #[error("mixed exact/approximate arithmetic")]
    MixedMode,

    #[error("operation requires {0:?} mode")]
    ModeRequired(Mode),

    #[error("value at index {0} is not positive")]
    NonPositive(i64),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("theorem violated ({mode:?} mode) at indices {witness:?}")]
    TheoremViolated { witness: Vec<i64>, mode: Mode },

    #[error("sequence does not carry the claimed pattern")]
    PatternMismatch,

    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),

    #[error("no valid domination certificate: {0}")]
    NoDominationCertificate(String),

    #[error("comparison within tolerance where strictness is asserted: {0}")]
    ToleranceAmbiguity(String),

    #[error("difference-quotient and weighted-average forms disagree")]
    FormMismatch,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
