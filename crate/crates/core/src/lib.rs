//! Exact counting of Eisenstein polynomials of bounded height, together with
//! the density constants that govern their asymptotic growth.
//!
//! Integer polynomials `a_d X^d + ... + a_1 X + a_0` are Eisenstein when some
//! prime `p` divides `a_0, ..., a_{d-1}`, `p^2` does not divide `a_0` and `p`
//! does not divide `a_d`. This crate counts them
//!
//! * exactly, by Möbius inclusion-exclusion over square-free moduli
//!   ([`counting`]),
//! * by exhaustive enumeration at small scale ([`oracle`]),
//!
//! and evaluates the limiting densities `θ_d` (monic) and `ρ_d` (general)
//! with rigorous two-sided brackets ([`density`]).
//!
//! The density code is generic over the scalar type through [`Scalar`]; the
//! aliases below fix the precisions used by the command-line tool.

pub mod arith;
pub mod counting;
pub mod density;
mod error;
pub mod oracle;
pub mod report;
pub mod scalar;

pub use arith::{ArithSieve, Factorization};
pub use counting::{CountMethod, ExactCount, Variant};
pub use density::{DensityEstimate, DensityKind, DensityMethod, Truncation};
pub use error::{Error, Result};
pub use oracle::{EnumerationBudget, Polynomial};
pub use report::{DensityTable, ErrorTermRow};
pub use scalar::{DoubleDouble, Scalar, Transcendental};

/// Double-double real with roughly 106 significant bits.
pub type Real = scalar::DoubleDouble;

/// Exact rational scalar, used to cross-check floating evaluations.
pub type Rational = num_rational::BigRational;

/// Density estimate at the default working precision.
pub type Estimate = DensityEstimate<Real>;
pub type EstimateF64 = DensityEstimate<f64>;
pub type EstimateF32 = DensityEstimate<f32>;
pub type EstimateExact = DensityEstimate<Rational>;
