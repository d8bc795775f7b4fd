use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point type the dynamics and solvers are evaluated in.
pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal, panicking only if the target cannot represent finite values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convex combination `weight * a + (1 - weight) * b`.
#[inline]
pub(crate) fn blend<F: Scalar>(weight: F, a: F, b: F) -> F {
    weight * a + (F::one() - weight) * b
}

/// Clamps into `[lo, hi]`, returning the bound itself on ties.
#[inline]
pub(crate) fn clamp<F: Scalar>(x: F, lo: F, hi: F) -> F {
    if x >= hi {
        hi
    } else if x <= lo {
        lo
    } else {
        x
    }
}
