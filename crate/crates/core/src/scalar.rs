//! Exact scalar abstractions.
//!
//! Everything in this crate is exact: integers for lattices and Smith forms,
//! rationals for power series and rational functions. The polynomial, series
//! and matrix code is written against the traits below so that it runs over
//! `BigInt`/`BigRational` in production and over machine-word types
//! (`i64`, `Ratio<i64>`) in tests where overflow is not a concern.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// A commutative ring element with exact arithmetic.
pub trait Scalar: Num + Clone + Debug + std::ops::Neg<Output = Self> {}

impl<T> Scalar for T where T: Num + Clone + Debug + std::ops::Neg<Output = T> {}

/// Marker for scalars whose division is exact field division.
pub trait ExactField: Scalar {}

impl ExactField for Ratio<BigInt> {}
impl ExactField for Ratio<i64> {}
impl ExactField for Ratio<i128> {}

/// Euclidean integers: the scalar type for lattices and Smith normal form.
pub trait ExactInt: Scalar + Integer + Signed + Ord {}

impl ExactInt for BigInt {}
impl ExactInt for i64 {}
impl ExactInt for i128 {}
