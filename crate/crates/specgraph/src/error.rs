use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },

    #[error("non-positive weight {weight} on edge ({u}, {v})")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },

    #[error("{family} requires {requirement}, got {given}")]
    SizeBelowMinimum {
        family: &'static str,
        requirement: &'static str,
        given: String,
    },

    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),

    #[error("pairing model exceeded {0} restarts without a simple graph")]
    RetryCapExceeded(usize),

    #[error("vertex set must be a proper nonempty subset")]
    EmptyOrFullSet,

    #[error("vertex {0} is isolated (degree 0)")]
    IsolatedVertex(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("singular linear system")]
    SingularSystem,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no labeled vertices")]
    NoLabels,

    #[error("component without a labeled vertex")]
    UnlabeledComponent,

    #[error("seed vector is orthogonal to the second generalized eigenvector")]
    SeedOrthogonalToFiedler,

    #[error("density matrix regularizer does not match the check: {0}")]
    MismatchedRegularizer(String),

    #[error("preconditioner graph is disconnected; increase the sample count")]
    DisconnectedPreconditioner,

    #[error("edge ({0}, {1}) has zero sampling probability")]
    ZeroProbabilityEdge(usize, usize),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("edge list parse error at line {line}: {message}")]
    ParseEdgeList { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
