use thiserror::Error;

use crate::simcore::Register;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("register layout needs {width} qubits, cap is {cap}")]
    WidthOverflow { width: usize, cap: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    BasisOutOfRange { index: usize, dim: usize },

    #[error("register {0:?} is not present in this layout")]
    MissingRegister(Register),

    #[error("invalid qubit operands: {0}")]
    InvalidQubits(String),

    #[error("matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("layouts differ between operands")]
    LayoutMismatch,

    #[error("post-selection of {register:?} = {outcome} has zero probability")]
    ImpossiblePostselection { register: Register, outcome: u64 },

    #[error("basis is not orthonormal (deviation {0:e})")]
    NonOrthonormalBasis(f64),

    #[error("invalid oracle table: {0}")]
    InvalidTable(String),

    #[error("register width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("engines disagree by {deviation:e} on column {column}")]
    EngineMismatch { column: String, deviation: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
