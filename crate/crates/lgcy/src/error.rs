use thiserror::Error;

/// Errors surfaced by the library. Input problems (parsing, validation) are
/// kept distinct from internal mathematical failures so the CLI can map them
/// to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),

    #[error("document syntax error at line {line}, column {column}: {msg}")]
    Document { line: usize, column: usize, msg: String },

    #[error("polynomial {poly}, offset {offset}: syntax error: {msg}")]
    PolySyntax { poly: usize, offset: usize, msg: String },

    #[error("polynomial {poly}, offset {offset}: unknown variable x{index} (valid indices are 1..={n})")]
    UnknownVariable { poly: usize, offset: usize, index: usize, n: usize },

    #[error("polynomial {poly}, offset {offset}: non-rational coefficient: {msg}")]
    NonRationalCoefficient { poly: usize, offset: usize, msg: String },

    #[error("group generator {index}: {msg}")]
    BadGenerator { index: usize, msg: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("working prime {prime} is unusable: {msg}")]
    BadPrime { prime: u64, msg: String },

    #[error("prime collision: ranks disagree between {p1} and {p2} even after retrying with fresh primes")]
    PrimeCollision { p1: u64, p2: u64 },

    #[error("group closure exceeded the safety cap of {cap} components; the symmetry group is not finite (invalid input)")]
    GroupClosureExceeded { cap: usize },

    #[error("inadmissible (weights, degree) pair for the Milnor series: {0}")]
    InadmissibleMilnorData(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
