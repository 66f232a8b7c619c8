use thiserror::Error;

/// Errors raised by the matrix, polynomial, seed and automorphism layers.
///
/// Indices carried by variants are zero-based; user-facing renderings
/// (the CLI diagnostics) add one.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square: expected {expected} entries in row {row}, found {found}")]
    NotSquare { row: usize, expected: usize, found: usize },

    #[error("declared rank {declared} does not match the {rows} matrix rows")]
    RankMismatchDocument { declared: usize, rows: usize },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("entries ({i},{j}) and ({j},{i}) are not sign-compatible", i = .i + 1, j = .j + 1)]
    SignIncompatible { i: usize, j: usize },

    #[error("matrix is not skew-symmetrizable")]
    NotSkewSymmetrizable,

    #[error("mutation index {index} is out of range for rank {rank}", index = .index + 1)]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("not a permutation of 1..={n}: {detail}")]
    InvalidPermutation { n: usize, detail: String },

    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("substitution image {index} is zero", index = .index + 1)]
    ZeroImage { index: usize },

    #[error("exponent {0} does not fit a machine word")]
    ExponentOverflow(String),

    #[error("exchange division at direction {k} is not exact; the seed is corrupted", k = .k + 1)]
    InexactExchange { k: usize },

    #[error("the exchange graph is incomplete; enumeration stopped at a bound")]
    PartialGraph,

    #[error("the zero matrix is not a valid input here")]
    ZeroMatrix,

    #[error("automorphism set is not closed: composing {left} and {right} leaves the set")]
    NotClosed { left: usize, right: usize },

    #[error("cannot parse Laurent polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("malformed graph document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
