use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not skew-symmetric: |M + M^t| = {residual:e} exceeds {tolerance:e}")]
    NotSkewSymmetric { residual: f64, tolerance: f64 },
    #[error("Pfaffian requires even order, got {0}")]
    OddOrder(usize),
    #[error("matrix is not Hermitian: |A - A*| = {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("matrix is singular: pivot {pivot:e} below threshold {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("antilinear pairing block is not antisymmetric: residual {0:e}")]
    NotAntisymmetric(f64),
    #[error("operator is not self-dual: |H* + AHA| = {0:e}")]
    NotSelfDual(f64),
    #[error("not a valid involution matrix: {0}")]
    BadInvolution(String),
    #[error("not a basis projection: {0}")]
    BadProjection(String),
    #[error("operator is not a Bogoliubov transformation: {0}")]
    NotBogoliubov(String),
    #[error("kernel pairing is numerically degenerate: overlap {0:e}")]
    KernelPairingFailure(f64),
    #[error("overlap construction is ill-conditioned: {0}")]
    DegenerateOverlap(String),
    #[error("quasi-free symbol violation: {0}")]
    SymbolViolation(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("operator is not even under the parity automorphism: residual {0:e}")]
    ParityViolation(f64),
    #[error("operator is not self-adjoint: residual {0:e}")]
    NotSelfAdjoint(f64),
    #[error("time grid too coarse: n = {n} does not exceed 1.01 * beta * |H| = {required:.6}")]
    GridTooCoarse { n: usize, required: f64 },
    #[error("covariance is singular")]
    SingularCovariance,
    #[error("elements live on different Grassmann spaces")]
    SpaceMismatch,
    #[error("weight matrix is not positive semi-definite: eigenvalue {0:e}")]
    NotPsd(f64),
    #[error("hypothesis fails: {0}")]
    NotApplicable(String),
    #[error("spectral gap {gap:e} does not exceed 2*gimel = {requirement:e}")]
    GapTooSmall { gap: f64, requirement: f64 },
    #[error("logarithm argument invalid: {0}")]
    BadLogArgument(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
