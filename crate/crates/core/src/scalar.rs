//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the kernels are built over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance for weight sums and measure-preservation checks.
    fn weight_tol() -> Self;

    /// Largest asymmetry a reader accepts before symmetrizing.
    fn symmetry_tol() -> Self;

    /// Convert an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn weight_tol() -> Self {
        1e-12
    }
    fn symmetry_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn weight_tol() -> Self {
        1e-5
    }
    fn symmetry_tol() -> Self {
        1e-5
    }
}
