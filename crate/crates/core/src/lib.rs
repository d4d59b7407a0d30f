//! Zeta functions of varieties over finite fields, their special values,
//! weight homology of normal crossing boundaries, and the regulator Euler
//! characteristics built from higher Chow groups.

pub mod abgroup;
pub mod chowcat;
pub mod cli;
pub mod ffield;
pub mod geometry;
pub mod poly;
pub mod scalar;
pub mod serial;
pub mod weight;
pub mod zeta;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact rational scalar used throughout.
pub type Rational = BigRational;
/// Arbitrary precision integer scalar.
pub type Integer = BigInt;
/// Polynomials with rational coefficients.
pub type PolyQ = poly::Poly<BigRational>;
/// Truncated power series with rational coefficients.
pub type PowerSeriesQ = zeta::PowerSeriesQ;
/// Rational functions with rational coefficients.
pub type RationalFunctionQ = zeta::RationalFunctionQ;
/// Integer matrices.
pub type IntMatrix = abgroup::IntMatrix;
