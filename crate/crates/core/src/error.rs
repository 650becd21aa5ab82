//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    /// Coordinates are negative, do not sum to one, or the enclosure excludes the simplex.
    #[error("point is not on the simplex: {0}")]
    NotOnSimplex(String),
    /// Two objects of different dimension were combined.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// A tournament edge list omits an unordered pair.
    #[error("edge list misses the pair ({0}, {1})")]
    MissingPair(usize, usize),
    /// A tournament edge list orients an unordered pair twice.
    #[error("edge list orients the pair ({0}, {1}) more than once")]
    DuplicatePair(usize, usize),
    /// A tournament edge from a candidate to itself.
    #[error("self loop at candidate {0}")]
    SelfLoop(usize),
    /// A candidate index outside `1..=n`.
    #[error("candidate index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    /// A tripartite part would be empty.
    #[error("part {0} of the partition is empty")]
    EmptyPart(usize),
    /// Candidates inside one part do not form a transitive order.
    #[error("part {0} is not transitive inside")]
    IncompleteIntra(usize),
    /// A partition is not a partition of the candidate set.
    #[error("invalid partition: {0}")]
    BadPartition(String),
    /// An exhaustive computation would exceed its size cap.
    #[error("{what} is too large: {value} exceeds the cap {cap}")]
    TooLarge { what: &'static str, value: u64, cap: u64 },
    /// Objects built over different candidate sets were combined.
    #[error("candidate universe mismatch: {0} versus {1}")]
    UniverseMismatch(usize, usize),
    /// A sampling job exceeds its work budget.
    #[error("work budget exceeded: {needed} leaf evaluations requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    /// Exact iteration beyond the configured step cap.
    #[error("exact iteration of {steps} steps exceeds the cap {cap}; use the interval backend")]
    ExactBlowup { steps: u64, cap: u64 },
    /// An orbit search reached its step cap without a hit.
    #[error("no certified hit within {0} steps")]
    CapExceeded(u64),
    /// Precision escalation reached its cap without a decision.
    #[error("undecided at the precision cap of {bits} bits ({context})")]
    UndecidedAtCap { bits: u32, context: String },
    /// A point is outside the required region M(eps).
    #[error("point is not in M(eps)")]
    NotInM,
    /// An input violates a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Division by an interval that contains zero.
    #[error("division by an interval containing zero")]
    DivisionByZero,
    /// Text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A configuration file or command line is invalid.
    #[error("configuration error: {0}")]
    Config(String),
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// JSON encoding or decoding failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
