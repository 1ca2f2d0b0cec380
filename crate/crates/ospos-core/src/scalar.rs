//! Scalar abstraction: every numerical routine in this crate is generic over a
//! real field `F` (`f32` or `f64`), with complex entries `Complex<F>`.

use nalgebra::{Complex, RealField};
use num_traits::FromPrimitive;

/// Real scalar type underlying all matrices and tolerances.
pub trait Scalar: RealField + FromPrimitive + Copy {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `F`. Panics only if `F` cannot represent
/// finite doubles, which neither implementor does.
pub fn real<F: Scalar>(v: f64) -> F {
    F::from_f64(v).expect("finite f64 converts into any Scalar")
}

/// Complex number with zero imaginary part.
pub fn cx<F: Scalar>(re: F) -> Complex<F> {
    Complex::new(re, F::zero())
}

/// Tolerances used by the checks in this crate. All defaults are 1e-10 except
/// the subspace rank cutoff, which is 1e-12 relative to the largest singular
/// value; `rank_gram` is the relative eigenvalue cutoff used when building
/// renormalized spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<F: Scalar> {
    /// Residual bound for projection and involution identities.
    pub tol_proj: F,
    /// Residual bound for orthonormality checks.
    pub tol_ortho: F,
    /// Eigenvalue floor for positive semidefiniteness checks.
    pub tol_psd: F,
    /// Relative singular-value cutoff when orthonormalizing spanning sets.
    pub rank_svd: F,
    /// Relative eigenvalue cutoff when truncating Gram matrices.
    pub rank_gram: F,
}

impl<F: Scalar> Default for Tolerances<F> {
    fn default() -> Self {
        Self {
            tol_proj: real(1e-10),
            tol_ortho: real(1e-10),
            tol_psd: real(1e-10),
            rank_svd: real(1e-12),
            rank_gram: real(1e-10),
        }
    }
}

impl<F: Scalar> Tolerances<F> {
    /// Tolerances with every residual bound set to `tol` (rank cutoffs keep
    /// their defaults). This is what the `OSPOS_TOL` override maps to.
    pub fn uniform(tol: F) -> Self {
        Self {
            tol_proj: tol,
            tol_ortho: tol,
            tol_psd: tol,
            ..Self::default()
        }
    }
}
