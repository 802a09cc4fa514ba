use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix dimension {0} outside supported range 2..=16")]
    UnsupportedDimension(usize),

    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max entrywise defect {0:e})")]
    NotHermitian(f64),

    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),

    #[error("Bloch vector ({x}, {y}, {z}) lies outside the unit ball")]
    InvalidBloch { x: f64, y: f64, z: f64 },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("identical states have no unique optimal element")]
    IdenticalStates,

    #[error("state is not diagonal in the computational basis")]
    NotDiagonal,

    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse state spec `{0}`")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
