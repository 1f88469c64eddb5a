use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("index {index} out of range {range}")]
    IndexOutOfRange { index: usize, range: &'static str },

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("invalid kinematics: {0}")]
    InvalidKinematics(String),

    #[error("rotation parameters not normalized: cos² + |v|² = {value}")]
    RotationNotNormalized { value: f64 },

    #[error("imaginary residue {residue:e} in correlation matrix")]
    ImaginaryResidue { residue: f64 },

    #[error("coefficient tie: {first} and {second} coincide ({lhs} vs {rhs})")]
    CoefficientTie {
        first: &'static str,
        second: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("states coincide; witness direction undefined")]
    CoincidentStates,

    #[error("angles outside domain: {0}")]
    Domain(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
