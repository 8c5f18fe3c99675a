//! Scalar carriers for the reductions: exact rationals and `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Exact = BigRational;

/// A field the column reduction can run over.
///
/// `is_negligible` is where the two carriers differ: exact values are zero
/// only when they are zero, floats are zero when they are small compared to
/// the magnitude of the column they live in.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for carriers that never round.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest carrier value; exact for both carriers on finite input.
    fn from_f64(v: f64) -> Self;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Whether `self` should be treated as zero in a column whose largest
    /// entry has magnitude `scale`.
    fn is_negligible(&self, scale: f64, eps: f64) -> bool;
}

impl Field for Exact {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        // numerator and denominator stay small in practice; fall back to a
        // ratio of floats when they do not fit
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) => n / d,
            _ => f64::NAN,
        }
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }

    fn magnitude(&self) -> f64 {
        Field::to_f64(&self.abs())
    }

    fn is_negligible(&self, _scale: f64, _eps: f64) -> bool {
        self.is_zero()
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn from_f64(v: f64) -> Self {
        v
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: f64, eps: f64) -> bool {
        self.abs() <= eps * scale.max(1.0)
    }
}
