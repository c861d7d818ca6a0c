//! Scalar abstraction shared by the dense linear algebra layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point type backing the complex entries: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, saturating through `FromPrimitive`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Absolute tolerance used when deciding that a rotation is negligible.
    fn jacobi_eps() -> Self;
}

impl Real for f32 {
    fn jacobi_eps() -> Self {
        1e-7
    }
}

impl Real for f64 {
    fn jacobi_eps() -> Self {
        1e-15
    }
}
