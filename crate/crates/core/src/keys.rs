//! Key domain: unsigned 64-bit keys and the order-preserving float encoding.
//!
//! Positive floats get their sign bit set, negative floats are bitwise
//! inverted. Unsigned order on the image then matches numeric order, with
//! `-0.0` encoded just below `+0.0`.

use crate::{Error, Result};

/// Keys are compared as unsigned integers.
pub type SortableKey = u64;

const SIGN: u64 = 1 << 63;

/// A float that is known not to be NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FloatKey(f64);

impl FloatKey {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::NanKey { index: 0 });
        }
        Ok(Self(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn encode(self) -> SortableKey {
        encode_bits(self.0)
    }
}

impl TryFrom<f64> for FloatKey {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<FloatKey> for f64 {
    fn from(key: FloatKey) -> f64 {
        key.0
    }
}

/// Maps a non-NaN float to a key with the same relative order.
pub fn encode_float(x: f64) -> Result<SortableKey> {
    FloatKey::new(x).map(FloatKey::encode)
}

/// Inverse of [`encode_float`].
#[inline]
pub fn decode_float(key: SortableKey) -> f64 {
    let bits = if key & SIGN != 0 { key ^ SIGN } else { !key };
    f64::from_bits(bits)
}

/// Encoding without the NaN check. A NaN still encodes to some key, it just
/// has no meaningful position.
#[inline]
pub fn encode_bits(x: f64) -> SortableKey {
    let bits = x.to_bits();
    if bits & SIGN != 0 {
        !bits
    } else {
        bits | SIGN
    }
}

/// Index of the first NaN, if any.
pub fn find_nan(values: &[f64]) -> Option<usize> {
    values.iter().position(|x| x.is_nan())
}
