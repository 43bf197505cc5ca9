use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // linear algebra
    #[error("matrix is not Hermitian: max |A - A*| = {defect:e} exceeds {tol:e}")]
    NonHermitian { defect: f64, tol: f64 },
    #[error("iteration did not converge within {sweeps} sweeps (off-diagonal {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("order violation: min eigenvalue of S - R is {min_eig:e}")]
    OrderViolation { min_eig: f64 },

    // groups
    #[error("operation is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {candidate} is not a two-sided identity")]
    NoIdentity { candidate: usize },
    #[error("element {element} has no inverse")]
    NoInverse { element: usize },
    #[error("table is not a Latin square: {0}")]
    NotLatinSquare(String),
    #[error("malformed multiplication table: {0}")]
    MalformedTable(String),
    #[error("group too large: {0}")]
    TooLarge(String),

    // seminorms
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    // dilation
    #[error("Gram conventions disagree: {0}")]
    ConventionMismatch(String),
    #[error("map is not positive definite: min Gram eigenvalue {min_eig:e}")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("operator norm {norm} exceeds 1")]
    NotContraction { norm: f64 },
    #[error("operator does not lie in the requested corner (residual {residual:e})")]
    CornerViolation { residual: f64 },

    // recovery
    #[error("dilation failed: {0}")]
    DilationFailure(Box<Error>),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("no partial-isometry pair reaches c/2 = {threshold}: values {values:?}")]
    SelectionFailure { values: [f64; 4], threshold: f64 },
    #[error("map is not unitary-valued: max |phi(g)*phi(g) - 1|_op = {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("map is not contractive: max |phi(g)|_op = {norm}")]
    NotContractive { norm: f64 },
    #[error("cannot snap to an exact isometry: {0}")]
    SnapFailure(String),
    #[error("ambient space too small to adjust dimension: {0}")]
    RankObstruction(String),

    // instances
    #[error("group is not abelian: {0}")]
    NotAbelian(String),
    #[error("cutdown rank {rank} outside 1..={dim}")]
    RankRange { rank: usize, dim: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
