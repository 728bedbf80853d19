//! Scalar abstraction: every numeric kernel in this crate is generic over
//! [`Real`], implemented for `f32` and `f64`.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, NumAssign, NumCast};

/// Floating-point scalar used throughout the solver stack.
///
/// `f64` is the intended production type (and what the crate-root aliases
/// use); `f32` is supported for experimentation with loosened tolerances.
pub trait Real:
    Float + NumAssign + NumCast + Sum + Default + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; used for literals and tolerances.
    fn from_f64(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("finite f64 literal")
    }

    /// Conversion from a count; exact for the sizes handled here.
    fn from_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("usize fits in scalar")
    }

    /// Widening (or identity) conversion to `f64`.
    fn to_f64(self) -> f64;

    fn half() -> Self {
        Self::from_f64(0.5)
    }

    fn two() -> Self {
        Self::from_f64(2.0)
    }
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}
