use thiserror::Error;

/// Errors raised by the numerical kernels, the boundary/potential models and
/// the scattering and spectral analyses built on top of them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is numerically singular")]
    Singular,

    #[error("boundary pair violates A^dagger B = B^dagger A (residual {residual:e})")]
    SelfadjointnessViolated { residual: f64 },
    #[error("boundary pair is rank deficient: A^dagger A + B^dagger B has eigenvalue ratio {ratio:e}")]
    RankDeficient { ratio: f64 },
    #[error("transformation matrix is numerically singular")]
    SingularTransform,

    #[error("potential is not selfadjoint at node {index} (residual {residual:e})")]
    NotSelfadjoint { index: usize, residual: f64 },
    #[error("invalid potential grid: {0}")]
    BadGrid(String),
    #[error("negative coordinate x = {0}")]
    NegativeCoordinate(f64),
    #[error("quadrature did not reach tolerance (error estimate {estimate:e})")]
    QuadratureFailure { estimate: f64 },

    #[error("integrator failure at x = {x}: {reason}")]
    IntegratorFailure { x: f64, reason: String },
    #[error("integrator tolerance not met (estimate {estimate:e})")]
    ToleranceNotMet { estimate: f64 },
    #[error("spectral point k = {re}+{im}i lies below the real axis")]
    LowerHalfPlane { re: f64, im: f64 },
    #[error("Jost matrix is numerically singular at k = {k} (condition {condition:e})")]
    SingularJost { k: f64, condition: f64 },
    #[error("free Jost matrix B - ikA is singular at the requested k")]
    SingularJ0,
    #[error("zero-energy extrapolation did not contract")]
    ExtrapolationDivergence,

    #[error("kernel dimension {kernel_dim} disagrees with winding number {winding} at kappa = {kappa}")]
    MultiplicityMismatch { kappa: f64, kernel_dim: usize, winding: i64 },
    #[error("bound-state refinement stalled near kappa = {kappa}")]
    RefinementStall { kappa: f64 },
    #[error("phase step too large after {doublings} doublings")]
    PhaseStepTooLarge { doublings: u32 },
    #[error("S(0) eigenvalue {re}+{im}i is not within tolerance of +1 or -1")]
    EigenvalueNotPlusMinusOne { re: f64, im: f64 },
    #[error("bound-state partner vector mismatch (residual {residual:e})")]
    BetaMatchFailure { residual: f64 },
    #[error("S(k) did not approach its high-energy limit before k = {k_max}")]
    UnsettledTail { k_max: f64 },
    #[error("boundary condition is not purely Dirichlet")]
    NotDirichlet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
