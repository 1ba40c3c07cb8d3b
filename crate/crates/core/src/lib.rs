//! Integral binary quadratic forms and their value sets.
//!
//! The crate decides when two forms take exactly the same set of values,
//! classifies forms as ordinary, lower extraordinary or upper extraordinary,
//! and provides the supporting machinery: reduction, class numbers,
//! fundamental units, exact representation tests and discriminant surveys.
//!
//! Form arithmetic is generic over [`Scalar`] (`i64`, `i128`, `BigInt`).
//! The aliases below fix the common instantiations.

pub mod arith;
pub mod classgroup;
pub mod classification;
pub mod error;
pub mod forms;
pub mod pell;
pub mod reduction;
pub mod scalar;
pub mod surveys;
pub mod valuesets;

pub use error::{FormError, Result};
pub use forms::{Form, Matrix2, ScheringForm, Unimodular};
pub use scalar::Scalar;

pub use num_bigint::BigInt;

/// Forms with arbitrary-precision coefficients.
pub type BigForm = Form<BigInt>;
/// Forms with `i64` coefficients, for desk-scale work.
pub type Form64 = Form<i64>;
/// Forms with `i128` coefficients.
pub type Form128 = Form<i128>;

pub type BigMatrix = Matrix2<BigInt>;
pub type Matrix64 = Matrix2<i64>;
