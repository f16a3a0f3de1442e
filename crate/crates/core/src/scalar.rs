//! Numeric bounds shared by the geometry engine.
//!
//! `Scalar` is what fraction-free elimination needs: ring operations plus a
//! division that is only ever called when the quotient is exact. `Field`
//! adds true division for back-substitution and projective normalization.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// `self / d` where the caller guarantees `d` divides `self`.
    fn exact_div(&self, d: &Self) -> Self;

    fn from_i64(v: i64) -> Self;
}

pub trait Field: Scalar + Div<Output = Self> + for<'a> Div<&'a Self, Output = Self> {}

impl Scalar for f64 {
    fn exact_div(&self, d: &Self) -> Self {
        self / d
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Field for f64 {}

impl Scalar for BigInt {
    fn exact_div(&self, d: &Self) -> Self {
        debug_assert!((self % d).is_zero(), "inexact division");
        self / d
    }

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

impl Scalar for BigRational {
    fn exact_div(&self, d: &Self) -> Self {
        self / d
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Field for BigRational {}

/// `base^exp` by repeated squaring.
pub fn pow<S: Scalar>(base: &S, mut exp: u32) -> S {
    let mut acc = S::one();
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = sq.clone() * &sq;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_repeated_product() {
        assert_eq!(pow(&BigInt::from(3), 5), BigInt::from(243));
        assert_eq!(pow(&2.0f64, 10), 1024.0);
        assert_eq!(pow(&BigRational::new(2.into(), 3.into()), 0), BigRational::one());
    }

    #[test]
    fn exact_div_on_integers() {
        assert_eq!(BigInt::from(42).exact_div(&BigInt::from(-7)), BigInt::from(-6));
    }
}
