use crate::kernel::KernelError;

/// Errors raised by the operator constructions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{operator} is not Hermitian (relative deviation {deviation:e} > {tolerance:e})")]
    NotHermitian { operator: &'static str, deviation: f64, tolerance: f64 },
    #[error("lambda = {re}{im:+}i lies in the spectrum of L (distance {distance:e})")]
    LambdaInSpectrumL { re: f64, im: f64, distance: f64 },
    #[error("boundary operator A has rank {rank}, expected full row rank {expected}")]
    RankDeficientA { rank: usize, expected: usize },
    #[error("lambda0 must be real and finite")]
    InvalidLambda0,
    #[error("vector does not belong to this setting: {0}")]
    ForeignVector(String),
    #[error("boundary parameters alpha = beta = 0")]
    DegenerateParams,
    #[error("domain does not realize as graph over H: {0}")]
    GraphRealization(String),
    #[error("lambda not in rho(L_ab): alpha T_lambda + beta is singular (condition {condition:e})")]
    NotInRobinResolventSet { condition: f64 },
    #[error("alpha adj(T_conj(lambda)) + beta is singular (condition {condition:e})")]
    SingularRobinDenominator { condition: f64 },
    #[error("Gamma undefined at {at}: 1 lies in the spectrum of G^ab I* (condition {condition:e})")]
    GammaUndefined { at: &'static str, condition: f64 },
    #[error("invertibility condition fails: 1 lies in the spectrum of the resolvent correction (condition {condition:e})")]
    InvertibilityConditionFails { condition: f64 },
    #[error("lambda not in the resolvent set of {operator} (margin {margin:e} <= {threshold:e})")]
    NotInResolventSet { operator: &'static str, margin: f64, threshold: f64 },
    #[error("Id - I* G_lambda is singular at {at} (condition {condition:e})")]
    BoundaryShiftSingular { at: &'static str, condition: f64 },
    #[error("relation inverse is multi-valued (kernel dimension {0})")]
    MultiValued(usize),
    #[error("right-hand side outside the range of the relation (relative defect {0:e})")]
    RangeDeficient(f64),
    #[error("relations act on different spaces")]
    AmbientMismatch,
    #[error("relation basis has rank zero")]
    EmptyRelation,
    #[error("M = (F_i* F_i)^(1/2) is numerically singular (condition {condition:e}); F_i should be injective")]
    SingularM { condition: f64 },
    #[error("constrained domain does not embed with full rank into H (rank {rank} of {dim})")]
    NotDenselyEmbedded { rank: usize, dim: usize },
    #[error("lambda lies on the non-negative real axis")]
    OnPositiveAxis,
    #[error("x = 0 is a singular point")]
    SingularPoint,
    #[error("sector dimension {dim} exceeds the configured cap {cap}")]
    MemoryGuard { dim: usize, cap: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn c_parts<R: crate::Real>(z: crate::C<R>) -> (f64, f64) {
    (z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}
