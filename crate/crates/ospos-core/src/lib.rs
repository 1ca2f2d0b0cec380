//! Finite-dimensional reflection positivity toolkit.
//!
//! Models a Hilbert space `C^n` carrying a selfadjoint involution (a
//! reflection) together with a distinguished subspace on which the compressed
//! reflection form is positive semidefinite. The crate provides
//!
//! - the correspondence between such positive subspaces and graphs of
//!   contractions from the fixed space of the reflection to its orthogonal
//!   complement ([`reflection`]),
//! - the renormalized inner-product space built from the compressed form,
//!   its canonical quotient factorization, and induced operators on it
//!   ([`renorm`]),
//! - Markov-type projection triples and the positivity they imply
//!   ([`markov`]),
//! - a two-block model where every object is an explicit closed form
//!   ([`two_block`]),
//! - stationary covariance kernels and their reflected semigroups
//!   ([`covariance`]),
//! - a quadrature discretization of a family of weighted Hardy-type kernels
//!   with known scaling spectrum ([`hs`]),
//! - JSON interchange for matrices, subspaces, and reflections ([`json`]).
//!
//! All numerical routines are generic over the real scalar through
//! [`scalar::Scalar`]; `f64` aliases live at the crate root.

pub mod covariance;
pub mod error;
pub mod hilbert;
pub mod hs;
pub mod json;
pub mod markov;
pub mod reflection;
pub mod renorm;
pub mod sample;
pub mod scalar;
pub mod two_block;

pub use error::{Error, Result};
pub use scalar::{Scalar, Tolerances};

/// Complex matrix over `f64`, the default precision.
pub type Matrix = hilbert::CMatrix<f64>;
/// Complex column vector over `f64`.
pub type Vector = hilbert::CVector<f64>;
/// Subspace of `C^n` over `f64`.
pub type Subspace = hilbert::Subspace<f64>;
/// Bounded operator on `C^n` over `f64`.
pub type Operator = hilbert::Operator<f64>;
/// Reflection (selfadjoint involution) over `f64`.
pub type Reflection = reflection::Reflection<f64>;
/// Partial contraction between subspaces over `f64`.
pub type PartialContraction = reflection::PartialContraction<f64>;

/// Renormalized quotient space over `f64`.
pub type RenormalizedSpace = renorm::RenormalizedSpace<f64>;

/// Center-positive-negative subspace triple over `f64`.
pub type ProjectionTriple = markov::ProjectionTriple<f64>;

/// Two-block contraction model over `f64`.
pub type TwoBlockModel = two_block::TwoBlockModel<f64>;

/// Stationary covariance function over `f64`.
pub type CovarianceFunction = covariance::CovarianceFunction<f64>;

/// Fractional kernel discretization over `f64`.
pub type HsDiscretization = hs::HsDiscretization<f64>;
