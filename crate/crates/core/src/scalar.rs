//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Scalar`] (`f32` or `f64`).

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + FftNum + Sum + Display + LowerExp + Debug
{
    /// Convert an `f64` literal, panicking only on genuinely unrepresentable
    /// values (never for ordinary constants).
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable in scalar type")
    }

    /// Convert a `usize` count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize not representable in scalar type")
    }

    /// Lossy widening to `f64` (exact for `f32`/`f64`).
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
