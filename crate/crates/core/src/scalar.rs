//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use ndarray::LinalgScalar;
use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Real floating-point type the solver and diagnostics are generic over.
///
/// Implemented for `f32` and `f64` through the blanket impl below. All
/// tolerances quoted in the tests assume `f64`.
pub trait Real:
    Float
    + FloatConst
    + FftNum
    + LinalgScalar
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + Default
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(value: f64) -> Self {
        <Self as num_traits::NumCast>::from(value).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(value: usize) -> Self {
        <Self as num_traits::NumCast>::from(value).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FftNum
        + LinalgScalar
        + Sum
        + AddAssign
        + SubAssign
        + MulAssign
        + Default
        + Display
        + LowerExp
        + Debug
        + Send
        + Sync
        + 'static
{
}
