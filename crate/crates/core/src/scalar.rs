//! Scalar abstraction shared by every numerical module.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Math goes through [`RealField`]; conversions go through `num-traits`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Loosest tolerance the type can honour for a requested `f64` tolerance.
    fn tolerance(requested: f64) -> Self {
        let eps = Self::default_epsilon().to_f64().unwrap_or(f64::EPSILON);
        lit(requested.max(64.0 * eps))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar converts to f64")
}

/// `exp(-i * theta)`.
#[inline]
pub fn phase<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), -theta.sin())
}
