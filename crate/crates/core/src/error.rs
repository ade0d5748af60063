use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    NotUnitTrace(f64),
    #[error("operator is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("invalid party index {0}")]
    InvalidParty(usize),
    #[error("state has rank above 2 (third eigenvalue {0:.3e})")]
    RankTooHigh(f64),
    #[error("R-picture has an imaginary residue of {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("R matrix fails the Pauli-expectation bounds: {0}")]
    InvalidRMatrix(String),
    #[error("filter determinant has modulus {0}, expected 1")]
    NotUnitDeterminant(f64),
    #[error("filter is singular")]
    SingularFilter,
    #[error("matrix is not a proper orthochronous Lorentz transformation: {0}")]
    NotLorentz(String),
    #[error("local marginal is singular; the state has a product-projector structure")]
    SingularMarginal,
    #[error("operator A with A†A ≤ I required (largest eigenvalue of A†A is {0})")]
    NotAContraction(f64),
    #[error("normal form is not diagonal; the conversion verdict is undetermined")]
    NormalFormObstruction,
    #[error("expected a {expected} state, found {found}")]
    ClassMismatch { expected: String, found: String },
    #[error("root bracket failed: {0}")]
    BracketFailure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
