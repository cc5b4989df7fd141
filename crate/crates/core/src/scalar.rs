//! Floating-point scalar abstraction shared by the geometry and scoring code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("literal representable in scalar type")
}

/// Converts an integer count into the scalar type.
#[inline]
pub fn count<T: Scalar>(value: u64) -> T {
    T::from_u64(value).expect("count representable in scalar type")
}

/// Nearest-integer rounding with ties toward positive infinity.
#[inline]
pub fn round_half_up<T: Scalar>(value: T) -> T {
    (value + lit(0.5)).floor()
}

/// Rounds to two decimal places, the precision used in output documents.
#[inline]
pub fn round2<T: Scalar>(value: T) -> T {
    let hundred: T = lit(100.0);
    (value * hundred).round() / hundred
}

#[inline]
pub fn clamp01<T: Scalar>(value: T) -> T {
    value.max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_round_up_on_both_signs() {
        assert_eq!(round_half_up(1.5f64), 2.0);
        assert_eq!(round_half_up(-0.5f64), 0.0);
        assert_eq!(round_half_up(-1.5f32), -1.0);
        assert_eq!(round_half_up(2.49f64), 2.0);
    }

    #[test]
    fn two_decimal_rounding() {
        assert_eq!(round2(100.0 * 36.0 / 99.0f64), 36.36);
        assert_eq!(round2(100.0 * 90.0 / 99.0f64), 90.91);
    }
}
