//! Crate-wide error type. Every variant names the violated precondition and
//! carries the measured residual where one exists.

use thiserror::Error;

/// Errors returned by the toolkit's operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not Hermitian: |M - M*| = {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("matrix is not a projection: |P^2 - P| = {residual:.3e} exceeds {tol:.3e}")]
    NotProjection { residual: f64, tol: f64 },

    #[error("matrix is not an involution: |T^2 - I| = {residual:.3e} exceeds {tol:.3e}")]
    NotInvolution { residual: f64, tol: f64 },

    #[error("subspace is not OS-positive: minimum compressed eigenvalue {min_eigenvalue:.3e} below -{tol:.3e}")]
    NotOsPositive { min_eigenvalue: f64, tol: f64 },

    #[error("signed form is negative on the subspace: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("subspace is not the graph of a map: plus-component kernel carries a minus-component of norm {residual:.3e}")]
    NotAGraph { residual: f64 },

    #[error("map is not contractive: operator norm {norm:.6} exceeds 1 + {tol:.3e}")]
    NotContraction { norm: f64, tol: f64 },

    #[error("contraction domain is not contained in the fixed space (residual {residual:.3e})")]
    DomainNotInFixedSpace { residual: f64 },

    #[error("contraction codomain is not contained in the reflected space (residual {residual:.3e})")]
    CodomainNotInReflectedSpace { residual: f64 },

    #[error("contraction is not maximal: domain has dimension {domain_dim}, fixed space {fixed_dim}")]
    NotMaximal { domain_dim: usize, fixed_dim: usize },

    #[error("alternating projections did not converge within {iterations} iterations (last step {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("B*B does not reproduce the compressed form: residual {residual:.3e} exceeds {tol:.3e}")]
    NotAFactorization { residual: f64, tol: f64 },

    #[error("operator is not unitary: |U*U - I| = {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("operator does not conjugate correctly under the reflection: |theta U theta - U*| = {residual:.3e} exceeds {tol:.3e}")]
    NotReflectionSymmetric { residual: f64, tol: f64 },

    #[error("operator moves the positive subspace visibly to the form: obstruction {residual:.3e} exceeds {tol:.3e}")]
    NotInvariant { residual: f64, tol: f64 },

    #[error("generator is not skew-adjoint: |A* + A| = {residual:.3e} exceeds {tol:.3e}")]
    NotSkewAdjoint { residual: f64, tol: f64 },

    #[error("induced step operator has spectrum outside (0, 1]: eigenvalue {eigenvalue:.6e}")]
    NonPositiveSpectrum { eigenvalue: f64 },

    #[error("semigroup law fails: |S(t)^2 - S(2t)| = {residual:.3e} exceeds {tol:.3e}")]
    SemigroupLawViolation { residual: f64, tol: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("blocks do not form a partition of 0..{n}: {reason}")]
    InvalidPartition { n: usize, reason: String },

    #[error("negative time {t} where the reflected grid requires t >= 0")]
    NegativeTime { t: f64 },

    #[error("time grid is empty or too small to build the renormalized space")]
    GridTooSmall,

    #[error("kernel exponent s = {s} outside the open interval (0, 1)")]
    InvalidS { s: f64 },

    #[error("scale a = {a} must exceed 1")]
    InvalidScale { a: f64 },

    #[error("quadrature construction failed: {0}")]
    QuadratureFailure(String),

    #[error("requested {requested} eigenvalues but the truncated space has dimension {available}")]
    RankDeficient { requested: usize, available: usize },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
