use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type used for model parameters.
///
/// Conversions here are plain `as` casts: they saturate instead of failing,
/// which is what the clamped bucket computations want.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn from_key(key: u64) -> Self;
    fn from_count(n: usize) -> Self;
    /// Truncating, saturating conversion. Negative values and NaN map to 0.
    fn saturating_usize(self) -> usize;
    /// `floor(self)` clamped to `0..=last`, with NaN mapping to 0. `last`
    /// must be a whole number below `2^53`.
    fn clamp_index(self, last: Self) -> usize;
    /// Saturating conversion of `floor(self)`.
    fn floor_i64(self) -> i64;
    /// Largest representable value strictly below one.
    fn below_one() -> Self;

    /// `x - origin` as a signed real, without wrapping.
    #[inline]
    fn key_offset(key: u64, origin: u64) -> Self {
        if key >= origin {
            Self::from_key(key - origin)
        } else {
            -Self::from_key(origin - key)
        }
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline(always)]
            fn from_key(key: u64) -> Self {
                key as $t
            }

            #[inline(always)]
            fn from_count(n: usize) -> Self {
                n as $t
            }

            #[inline(always)]
            fn saturating_usize(self) -> usize {
                self as usize
            }

            #[inline(always)]
            fn clamp_index(self, last: Self) -> usize {
                // `max` discards NaN, so the value is finite and in range
                // and truncation agrees with floor.
                let v = self.max(0.0).min(last);
                debug_assert!(v >= 0.0 && v <= last);
                unsafe { v.to_int_unchecked::<i64>() as usize }
            }

            #[inline(always)]
            fn floor_i64(self) -> i64 {
                self.floor() as i64
            }

            #[inline(always)]
            fn below_one() -> Self {
                1.0 - <$t>::EPSILON / 2.0
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_one_is_the_predecessor_of_one() {
        assert!(f64::below_one() < 1.0);
        assert_eq!(f64::from_bits(f64::below_one().to_bits() + 1), 1.0);
        assert_eq!(f32::from_bits(f32::below_one().to_bits() + 1), 1.0);
    }

    #[test]
    fn clamp_index_floors_and_clamps() {
        assert_eq!(2.9f64.clamp_index(3.0), 2);
        assert_eq!((-0.5f64).clamp_index(3.0), 0);
        assert_eq!(7.0f64.clamp_index(3.0), 3);
        assert_eq!(f64::NAN.clamp_index(3.0), 0);
        assert_eq!(f64::INFINITY.clamp_index(3.0), 3);
        assert_eq!(f32::NEG_INFINITY.clamp_index(255.0), 0);
    }

    #[test]
    fn key_offset_is_signed() {
        assert_eq!(f64::key_offset(10, 4), 6.0);
        assert_eq!(f64::key_offset(4, 10), -6.0);
        assert_eq!(f64::key_offset(0, u64::MAX), -(u64::MAX as f64));
    }

    #[test]
    fn saturating_conversions() {
        assert_eq!((-3.7f64).saturating_usize(), 0);
        assert_eq!(f64::NAN.saturating_usize(), 0);
        assert_eq!((-0.5f64).floor_i64(), -1);
        assert_eq!(2.999f32.floor_i64(), 2);
    }
}
