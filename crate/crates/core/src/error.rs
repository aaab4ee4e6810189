use thiserror::Error;

/// Errors raised by the numerical core and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not a projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("element is not normal in block {block}")]
    NotNormal { block: usize },
    #[error("element is not symmetric (x != x*)")]
    NotSymmetric,
    #[error("invalid algebra or state: {0}")]
    InvalidState(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("unsupported partition: {0}")]
    UnsupportedPartition(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("malformed lattice table: {0}")]
    MalformedTable(String),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("projector has zero trace")]
    ZeroProjector,
    #[error("outcome has zero probability ({0:e})")]
    ZeroProbability(f64),
    #[error("projectors {0} and {1} are not mutually orthogonal")]
    NotOrthogonalFamily(usize, usize),
    #[error("correlation box is signaling (violation {0:e})")]
    NotNonSignaling(f64),
    #[error("invalid correlation box: {0}")]
    InvalidBox(String),
    #[error("invalid measurement directions: {0}")]
    InvalidDirections(String),
    #[error("malformed contexts: {0}")]
    MalformedContexts(String),
    #[error("checksum mismatch: expected {expected}, computed {computed}")]
    Checksum { expected: String, computed: String },
    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
