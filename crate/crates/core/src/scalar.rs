//! Scalar traits for exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An exact integral domain: division is only ever called when it is
/// exact (fraction-free elimination relies on this).
pub trait Exact: Num + Clone + std::fmt::Debug {}

impl<T: Num + Clone + std::fmt::Debug> Exact for T {}

/// An exact field (division always exact).
pub trait ExactField: Exact + Signed + PartialOrd {}

impl<T> ExactField for Ratio<T> where T: Clone + Integer + Signed + std::fmt::Debug {}

/// `BigInt` to `i64`, panicking on overflow (only used for small data
/// such as Weyl group matrices and CLI formatting).
pub fn to_i64(x: &BigInt) -> i64 {
    i64::try_from(x).expect("integer out of i64 range")
}
