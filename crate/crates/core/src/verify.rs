//! Output checks: sortedness and an order-independent multiset fingerprint.

/// 128-bit fingerprint of a multiset of keys. Two independent 64-bit sums of
/// mixed keys plus the element count; equal multisets always collide, unequal
/// ones almost never do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultisetHash {
    lo: u64,
    hi: u64,
    len: u64,
}

impl MultisetHash {
    pub fn of(keys: &[u64]) -> Self {
        let mut h = Self::default();
        for &k in keys {
            h.add(k);
        }
        h
    }

    #[inline]
    pub fn add(&mut self, key: u64) {
        self.lo = self.lo.wrapping_add(mix(key));
        self.hi = self.hi.wrapping_add(mix(key ^ 0x6a09_e667_f3bc_c908));
        self.len += 1;
    }

    pub fn value(&self) -> u128 {
        ((self.hi as u128) << 64 | self.lo as u128) ^ self.len as u128
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn is_sorted(keys: &[u64]) -> bool {
    keys.windows(2).all(|w| w[0] <= w[1])
}

/// Sorted and a permutation of the input.
pub fn verify_sorted(input: &MultisetHash, output: &[u64]) -> bool {
    is_sorted(output) && MultisetHash::of(output) == *input
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_independent() {
        assert_eq!(
            MultisetHash::of(&[1, 2, 3, 3]),
            MultisetHash::of(&[3, 1, 3, 2])
        );
        assert_ne!(
            MultisetHash::of(&[1, 2, 3, 3]),
            MultisetHash::of(&[1, 2, 2, 3])
        );
        assert_ne!(MultisetHash::of(&[0]), MultisetHash::of(&[0, 0]));
        assert!(MultisetHash::of(&[]).is_empty());
    }

    #[test]
    fn sortedness() {
        assert!(is_sorted(&[]));
        assert!(is_sorted(&[1, 1, 2]));
        assert!(!is_sorted(&[2, 1]));
        let h = MultisetHash::of(&[2, 1]);
        assert!(verify_sorted(&h, &[1, 2]));
        assert!(!verify_sorted(&h, &[1, 1]));
    }
}
