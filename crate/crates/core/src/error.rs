use thiserror::Error;

/// Matrix Market parse failures. Every variant carries the 1-based line
/// number at which the problem was detected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: missing or malformed MatrixMarket banner")]
    MalformedBanner { line: usize },
    #[error("line {line}: unsupported format `{what}` (only `matrix coordinate` is accepted)")]
    UnsupportedFormat { line: usize, what: String },
    #[error("line {line}: unsupported field or symmetry `{what}`")]
    UnsupportedQualifier { line: usize, what: String },
    #[error("line {line}: malformed size line")]
    MalformedSize { line: usize },
    #[error("line {line}: malformed entry")]
    MalformedEntry { line: usize },
    #[error("line {line}: index ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("line {line}: expected {expected} entries, found {found}")]
    Truncated {
        line: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vertex {0} has zero degree; normalized Laplacian undefined")]
    DegenerateDegree(usize),

    #[error("cannot split {n} vertices into {parts} non-empty parts")]
    InfeasibleParts { n: usize, parts: usize },

    #[error("eigensolver breakdown at iteration {iteration}: trial basis rank {rank} < {required} after rank repair")]
    Breakdown {
        iteration: usize,
        rank: usize,
        required: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
