use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrsError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("stuck system: no equation is solvable for a single unknown; remaining: {}", .0.join("; "))]
    StuckSystem(Vec<String>),
    #[error("inconsistent system: {0} = 0")]
    InconsistentSystem(String),
    #[error("relation required: {0} = 0")]
    RelationRequired(String),
    #[error("invalid surface index n = {0}")]
    InvalidN(i64),
    #[error("unresolved factor {0}")]
    UnresolvedFactor(String),
    #[error("not accessible: {0}")]
    NotAccessible(String),
    #[error("matrix is not triangular: {0}")]
    NotTriangular(String),
    #[error("leading eigenvalue vanishes identically")]
    ZeroLeadingEigenvalue,
    #[error("not resolvable: {0}")]
    NotResolvable(String),
    #[error("malformed expansion: {0}")]
    MalformedExpansion(String),
    #[error("underdetermined: free unknowns {}", .0.join(", "))]
    Underdetermined(Vec<String>),
    #[error("verification mismatch: {0}")]
    VerificationMismatch(String),
    #[error("relation violated: {0}")]
    RelationViolated(String),
    #[error("degenerate points: {0}")]
    DegeneratePoints(String),
    #[error("no correspondence; residual: {0}")]
    NoCorrespondence(String),
    #[error("zero entry at position {0}")]
    ZeroEntry(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("degenerate denominator {0} vanishes")]
    DegenerateDenominator(String),
    #[error("no relation: the system is consistent for all eigenvalues")]
    NoRelation,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = GrsError> = std::result::Result<T, E>;
