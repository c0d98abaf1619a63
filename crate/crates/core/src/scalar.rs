//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance used for norm and probability invariants.
    ///
    /// `1e-12` for `f64`; scaled up from machine epsilon for narrower types.
    fn invariant_tol() -> Self {
        let floor = Self::from_f64(1e-12).unwrap();
        let scaled = Self::epsilon() * Self::from_f64(64.0).unwrap();
        floor.max(scaled)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Lossless-enough conversion of an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}
