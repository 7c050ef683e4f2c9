//! Scalar abstraction shared by the graphon, regularity and distribution code.
//!
//! Everything that is pure field arithmetic (convolution, stepping, cut norms,
//! linear functionals) is written once against [`Scalar`] and runs either in
//! `f64` or in exact `BigRational` arithmetic. Transcendental quantities
//! (logarithms in `b`, `I_nu`, `H`) are always evaluated in `f64` after the
//! exact part has been carried out in the scalar type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Ordered field used for step-function values and part measures.
pub trait Scalar:
    Num + Signed + FromPrimitive + ToPrimitive + Clone + PartialOrd + Debug + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Tolerance for equality-type predicates such as row sums in `W^G_00`.
    /// Zero in exact arithmetic.
    fn tolerance() -> Self;

    /// `num / den` in this scalar type.
    fn ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_exact(k: usize) -> Self {
        Self::from_usize(k).expect("usize fits every scalar type")
    }

    /// `|a - b| <= tolerance()`.
    fn near(a: &Self, b: &Self) -> bool {
        let d = a.clone() - b.clone();
        d.abs() <= Self::tolerance()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-9
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-5
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Tolerance for sums that should be exactly one: strict in exact mode,
/// `1e-12` for floats.
pub(crate) fn unit_sum_tolerance<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_f64(1e-12).unwrap_or_else(T::tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_exact_for_rationals() {
        let third = BigRational::ratio(1, 3);
        let sum = third.clone() + third.clone() + third;
        assert_eq!(sum, BigRational::ratio(1, 1));
    }

    #[test]
    fn near_uses_type_tolerance() {
        assert!(f64::near(&1.0, &(1.0 + 1e-10)));
        assert!(!f64::near(&1.0, &1.001));
        assert!(!BigRational::near(&BigRational::ratio(1, 3), &BigRational::ratio(333, 1000)));
    }
}
