use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group mismatch: {left:?} vs {right:?}")]
    GroupMismatch { left: Vec<u32>, right: Vec<u32> },

    #[error("invalid group element {residues:?} for moduli {moduli:?}")]
    InvalidElement { residues: Vec<u32>, moduli: Vec<u32> },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid cochain: {0}")]
    InvalidCochain(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("not a cochain graphon: {0}")]
    NotGraphon(String),

    #[error("graphon is not in W_00: {0}")]
    NotInW00(String),

    #[error("graphon has a zero entry at part ({i}, {j}), group index {g}; dual maximizer is unbounded")]
    ZeroEntry { i: usize, j: usize, g: usize },

    #[error("{parts} parts exceed the exact cut norm limit of {limit}; use the heuristic mode")]
    TooManyParts { parts: usize, limit: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{0} is not P-measurable")]
    NotMeasurable(String),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("n = {n} is outside the supported range {min}..={max} for {what}")]
    SizeOutOfRange { what: &'static str, n: usize, min: usize, max: usize },

    #[error("edge probability c/n = {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("numerical rank {found} differs from the expected {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
