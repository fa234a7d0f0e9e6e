use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not rational: {0}")]
    NonRational(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("unsupported diagram: {0}")]
    UnsupportedDiagram(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    #[error("Casimir operator is not scalar on block {block}: {detail}")]
    CasimirNotScalar { block: usize, detail: String },
    #[error("structure-constant sum rule violated for block {block}: {detail}")]
    SumRuleViolation { block: usize, detail: String },
    #[error("no selected pair for block {0} with vanishing superdimension")]
    NoSelectedPair(usize),
    #[error("Ricci routes disagree: {0}")]
    RouteDisagreement(String),
    #[error("unsupported block pattern: {0}")]
    UnsupportedBlockPattern(String),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("reconciliation failure: {0}")]
    ReconciliationFailure(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
