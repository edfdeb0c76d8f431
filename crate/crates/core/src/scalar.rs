//! Floating point abstraction shared by every transform.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Real scalar the transforms are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + FftNum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn from_i64_(n: i64) -> Self {
        Self::from_i64(n).expect("i64 representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Complex Cartesian 3-vector.
pub type CVec3<T> = [Complex<T>; 3];

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cvec_zero<T: Real>() -> CVec3<T> {
    [czero(), czero(), czero()]
}

/// Euclidean norm of a complex 3-vector.
#[inline]
pub fn cvec_norm<T: Real>(v: &CVec3<T>) -> T {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

/// Bilinear (non-conjugating) dot of a complex vector with a real vector.
#[inline]
pub fn cvec_dot_real<T: Real>(v: &CVec3<T>, x: &[T; 3]) -> Complex<T> {
    v[0] * x[0] + v[1] * x[1] + v[2] * x[2]
}
