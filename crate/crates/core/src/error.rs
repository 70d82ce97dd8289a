use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: |A - A*|_F = {deviation:e}")]
    NonHermitianInput { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("columns are rank deficient: numerical rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("operator is not a projection (|A^2 - A|_F = {residual:e})")]
    NotAProjection { residual: f64 },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("columns are not orthonormal: |F*F - I|_F = {deviation:e}")]
    NotOrthonormal { deviation: f64 },
    #[error("subspaces are not compatible (|[P_X, P_Y]|_F = {commutator:e})")]
    NotCompatible { commutator: f64 },
    #[error("ambient dimension {ambient} is smaller than {required}")]
    InsufficientAmbientDim { ambient: usize, required: usize },
    #[error("invalid rank {rank} for dimension {dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("matrix is not an isometry: |U*U - I|_F = {deviation:e}")]
    NotAnIsometry { deviation: f64 },
    #[error("W is not orthogonal to the range of U: |W*U|_F = {overlap:e}")]
    NotOrthogonal { overlap: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("frame is not a member of X_k(X, Y) (residual {residual:e})")]
    NotAMember { residual: f64 },
    #[error("local dimension estimators disagree: jacobian {jacobian}, pca {pca}")]
    EstimatorDisagreement { jacobian: usize, pca: usize },
    #[error("cross validation failed: {0}")]
    CrossValidationFailed(String),
    #[error("image of a rank-{rank} projection is not a projection of rank {expected_rank}")]
    ImageNotProjection { rank: usize, expected_rank: usize },
    #[error("star images disagree between sample sets (gap {gap:e})")]
    InconsistentStarImages { gap: f64 },
    #[error("common intersection is unstable: {0}")]
    UnstableIntersection(String),
    #[error("line map is not induced by a semilinear map (gap {gap:e})")]
    NotSemilinear { gap: f64 },
    #[error("cannot decide between linear and conjugate-linear (ratio {re} + {im}i)")]
    SigmaAmbiguous { re: f64, im: f64 },
    #[error("classification was rejected; nothing to verify")]
    NothingToVerify,
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
