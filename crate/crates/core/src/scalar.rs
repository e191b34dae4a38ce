use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    'static
    + Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
{
    /// Converts a literal. Panics only if the target type cannot represent
    /// finite `f64` values, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in float")
    }

    /// `nominal`, raised to a small multiple of machine epsilon when the
    /// type cannot resolve it (f32).
    #[inline]
    fn tolerance(nominal: f64) -> Self {
        Self::lit(nominal).max(Self::epsilon() * Self::lit(1e3))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cre<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn cim<T: Real>(im: T) -> C<T> {
    Complex::new(T::zero(), im)
}
