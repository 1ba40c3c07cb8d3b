//! Integer scalar abstraction shared by every module.
//!
//! All form arithmetic is written against [`Scalar`], which is implemented
//! for `i64`, `i128` and [`BigInt`]. Fixed-width instantiations panic on
//! overflow in debug builds like any other integer code; use `BigInt` when
//! coefficients or matrix entries can grow without bound.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::error::{FormError, Result};

pub trait Scalar:
    Integer
    + Signed
    + Roots
    + Clone
    + Debug
    + Display
    + Hash
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn to_bigint(&self) -> BigInt;

    fn from_bigint(value: &BigInt) -> Option<Self>;

    fn from_i64_exact(value: i64) -> Self {
        Self::from_i64(value).expect("every scalar type holds an i64")
    }

    /// Converts through `BigInt`, reporting an overflow when the target is too narrow.
    fn try_from_bigint(value: &BigInt) -> Result<Self> {
        Self::from_bigint(value).ok_or_else(|| FormError::Overflow(value.to_string()))
    }
}

impl Scalar for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(value: &BigInt) -> Option<Self> {
        value.to_i64()
    }
}

impl Scalar for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(value: &BigInt) -> Option<Self> {
        value.to_i128()
    }
}

impl Scalar for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn from_bigint(value: &BigInt) -> Option<Self> {
        Some(value.clone())
    }
}

pub(crate) fn small<T: Scalar>(value: i64) -> T {
    T::from_i64_exact(value)
}

/// Converts a scalar to `i64`, the working width of the desk-scale routines.
pub(crate) fn to_i64<T: Scalar>(value: &T) -> Result<i64> {
    value
        .to_i64()
        .ok_or_else(|| FormError::Overflow(value.to_string()))
}

/// True when `n` is a perfect square (negative numbers never are).
pub fn is_square<T: Scalar>(n: &T) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    r.clone() * r == *n
}

pub(crate) fn gcd3<T: Scalar>(a: &T, b: &T, c: &T) -> T {
    a.gcd(b).gcd(c)
}
