//! Base-case sorters: insertion sort for tiny ranges and a byte radix sort
//! that skips bytes which are constant across the range.

pub const DEFAULT_INSERTION_THRESHOLD: usize = 32;

/// Stable insertion sort. Returns the number of element shifts.
pub fn insertion_sort(keys: &mut [u64]) -> usize {
    let mut shifts = 0;
    for i in 1..keys.len() {
        let x = keys[i];
        if keys[i - 1] <= x {
            continue;
        }
        let mut j = i - 1;
        keys[i] = keys[j];
        while j > 0 && keys[j - 1] > x {
            keys[j] = keys[j - 1];
            j -= 1;
        }
        keys[j] = x;
        shifts += i - j;
    }
    shifts
}

/// Radix sort with a temporary buffer. Returns the number of counting
/// passes on the longest path through the recursion.
pub fn radix_base_case(keys: &mut [u64]) -> u32 {
    radix_sort_with(keys, &mut Vec::new(), DEFAULT_INSERTION_THRESHOLD)
}

/// MSD radix sort with 8-bit digits, reusing `scratch` (grown to
/// `keys.len()` if needed).
///
/// Each range is distributed on `(key - min) >> shift`, with the shift
/// chosen so the digit spans exactly 8 bits of the range's spread. Leading
/// bytes shared by every key never cost a pass, and no key goes through
/// more than 8 passes. Ranges of at most `insertion_threshold` keys go to
/// insertion sort.
pub fn radix_sort_with(
    keys: &mut [u64],
    scratch: &mut Vec<u64>,
    insertion_threshold: usize,
) -> u32 {
    let n = keys.len();
    let threshold = insertion_threshold.max(1);
    if n > threshold && scratch.len() < n {
        scratch.resize(n, 0);
    }
    let len = n.min(scratch.len());
    if n <= u32::MAX as usize {
        msd::<u32>(keys, &mut scratch[..len], threshold)
    } else {
        msd::<usize>(keys, &mut scratch[..len], threshold)
    }
}

/// Bucket counter type; narrower counters keep the tables in fewer cache
/// lines.
trait Count: Copy + Default + std::ops::AddAssign {
    const ONE: Self;
    fn idx(self) -> usize;
}

impl Count for u32 {
    const ONE: Self = 1;
    #[inline(always)]
    fn idx(self) -> usize {
        self as usize
    }
}

impl Count for usize {
    const ONE: Self = 1;
    #[inline(always)]
    fn idx(self) -> usize {
        self
    }
}

fn msd<C: Count>(keys: &mut [u64], tmp: &mut [u64], threshold: usize) -> u32 {
    let n = keys.len();
    if n <= threshold {
        insertion_sort(keys);
        return 0;
    }
    let (mut lo, mut hi) = (u64::MAX, 0);
    for &k in keys.iter() {
        lo = lo.min(k);
        hi = hi.max(k);
    }
    let spread = hi - lo;
    if spread == 0 {
        return 0;
    }
    let shift = (64 - spread.leading_zeros()).saturating_sub(8);
    let digit = |k: u64| ((k - lo) >> shift) as usize;

    let mut next = [C::default(); 257];
    for &k in keys.iter() {
        next[digit(k) + 1] += C::ONE;
    }
    let mut largest = 0;
    for i in 1..257 {
        largest = largest.max(next[i].idx());
        let prev = next[i - 1];
        next[i] += prev;
    }
    let bounds = next;
    for &k in keys.iter() {
        let slot = &mut next[digit(k)];
        tmp[(*slot).idx()] = k;
        *slot += C::ONE;
    }
    keys.copy_from_slice(tmp);

    if shift == 0 || largest <= 1 {
        return 1;
    }
    let mut deepest = 0;
    if largest > threshold {
        for w in bounds.windows(2) {
            let (a, b) = (w[0].idx(), w[1].idx());
            if b - a > threshold {
                deepest = deepest.max(msd::<C>(&mut keys[a..b], &mut tmp[a..b], threshold));
            }
        }
    }
    // Small digit buckets are finished by one insertion sweep over the whole
    // range; keys only move within their bucket.
    insertion_sort(keys);
    1 + deepest
}
