use thiserror::Error;

/// Errors produced by lattice construction, dynamics, and samplers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension d = {0} not supported (must be 1, 2 or 3)")]
    BadDimension(usize),

    #[error("invalid lattice parameters: {0}")]
    BadLattice(String),

    #[error("site index {index} out of range for {m} sites")]
    SiteOutOfRange { index: usize, m: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid hopping schedule: {0}")]
    InvalidSchedule(String),

    #[error("matrix is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("permanent size {0} exceeds cost guard of {1}")]
    PermanentTooLarge(usize, usize),

    #[error("particle number mismatch: input has {input}, output has {output}")]
    ParticleMismatch { input: usize, output: usize },

    #[error("enumeration guard exceeded: {0} configurations > {1}")]
    EnumerationGuard(u64, u64),

    #[error("Fock dimension guard exceeded: {0} > {1}")]
    FockGuard(u64, u64),

    #[error("boson count {0} exceeds guard of {1}")]
    TooManyBosons(usize, usize),

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("sites {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("overlapping gates in layer {0}")]
    OverlappingGates(usize),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
