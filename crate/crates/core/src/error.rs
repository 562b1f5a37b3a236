use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^H| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("index ({k}, {l}) out of range for d = {d}")]
    IndexOutOfRange { d: usize, k: usize, l: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("dimension {0} is not prime")]
    NonPrimeDimension(usize),
    #[error("multiplicity {value} is not within tolerance of an integer")]
    NonIntegerMultiplicity { value: f64 },
    #[error("beta = {beta} out of range 1..={max}")]
    BetaOutOfRange { beta: usize, max: usize },
    #[error("even dimension {0} is not supported by the Wigner kernel family")]
    EvenDimension(usize),
    #[error("not a density matrix: {0}")]
    NotAState(String),
    #[error("{negatives} negative weights with d = {d}; at most d - 1 are allowed")]
    TooManyNegatives { negatives: usize, d: usize },
    #[error("sign violation: {0}")]
    SignViolation(String),
    #[error("rotation {index} is not orthogonal (defect {defect:e})")]
    NotOrthogonal { index: usize, defect: f64 },
    #[error("rotation {index} does not fix (1,...,1) (defect {defect:e})")]
    DoesNotFixDiagonalAxis { index: usize, defect: f64 },
    #[error("the basis subset must be nonempty")]
    EmptyGamma,
    #[error("basis index {index} out of range 0..={max}")]
    BasisOutOfRange { index: usize, max: usize },
    #[error("index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("invalid tolerance: eps_eq={eps_eq:e}, eps_psd={eps_psd:e}, eps_herm={eps_herm:e}")]
    InvalidTolerance {
        eps_eq: f64,
        eps_psd: f64,
        eps_herm: f64,
    },
    #[error("irrep {0} is not available for this dimension")]
    UnsupportedIrrep(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certification routes disagree: {0}")]
    RouteDisagreement(String),
}
