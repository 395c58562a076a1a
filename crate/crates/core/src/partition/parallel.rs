//! Building blocks for cooperative partitioning by several workers.
//!
//! Each worker classifies its own block-aligned stripe with private buffers.
//! The full blocks are then gathered into one prefix, and all workers permute
//! blocks concurrently, claiming slots through per-bucket atomic cursors.

use std::ops::Range;
use std::sync::atomic::{AtomicU32, AtomicU64, AtomicUsize, Ordering};

use crate::Classifier;

/// Raw view of a key array shared between workers that write disjoint parts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SharedKeys {
    ptr: *mut u64,
    len: usize,
}

// Workers only touch disjoint ranges or slots they claimed exclusively.
unsafe impl Send for SharedKeys {}
unsafe impl Sync for SharedKeys {}

impl SharedKeys {
    pub(crate) fn new(keys: &mut [u64]) -> Self {
        Self {
            ptr: keys.as_mut_ptr(),
            len: keys.len(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    /// View of a subrange, with offsets relative to `range.start`.
    pub(crate) fn sub(&self, range: Range<usize>) -> Self {
        assert!(range.start <= range.end && range.end <= self.len);
        Self {
            ptr: self.ptr.wrapping_add(range.start),
            len: range.end - range.start,
        }
    }

    /// # Safety
    /// No other live reference may overlap `range` while the slice is in use.
    #[allow(clippy::mut_from_ref)]
    pub(crate) unsafe fn slice_mut(&self, range: Range<usize>) -> &mut [u64] {
        assert!(range.start <= range.end && range.end <= self.len);
        std::slice::from_raw_parts_mut(self.ptr.add(range.start), range.end - range.start)
    }
}

/// Splits `0..n` into `threads` stripes whose starts are block aligned.
pub(crate) fn stripes(n: usize, threads: usize, block: usize) -> Vec<Range<usize>> {
    let per = n.div_ceil(threads).div_ceil(block) * block;
    (0..threads)
        .map(|t| (t * per).min(n)..((t + 1) * per).min(n))
        .collect()
}

/// Moves full blocks that sit past the combined prefix into the empty tails
/// of earlier stripes. Returns the number of full blocks.
pub(crate) fn gather_full_blocks(
    keys: &mut [u64],
    stripes: &[Range<usize>],
    filled: &[usize],
    block: usize,
) -> usize {
    let b = block;
    let total: usize = filled.iter().sum();
    let mut holes = Vec::new();
    let mut strays = Vec::new();
    for (stripe, &f) in stripes.iter().zip(filled) {
        let first = stripe.start / b;
        let end = stripe.end / b;
        holes.extend((first + f).max(first)..end.min(total));
        strays.extend(first.max(total)..first + f);
    }
    debug_assert_eq!(holes.len(), strays.len());
    for (hole, stray) in holes.into_iter().zip(strays) {
        keys.copy_within(stray * b..(stray + 1) * b, hole * b);
    }
    total
}

const NONE: usize = usize::MAX;

/// Per-bucket write/read slot cursors packed into one word, plus a count of
/// workers currently copying a block out of the bucket's region.
#[derive(Debug, Default)]
pub(crate) struct Cursors {
    slots: Vec<AtomicU64>,
    readers: Vec<AtomicU32>,
    overflow_bucket: AtomicUsize,
}

#[inline]
fn pack(write: usize, read: usize) -> u64 {
    (write as u64) << 32 | read as u64
}

#[inline]
fn unpack(v: u64) -> (usize, usize) {
    ((v >> 32) as usize, (v & 0xffff_ffff) as usize)
}

impl Cursors {
    /// Largest slot count the packed cursors can address.
    pub(crate) const MAX_SLOTS: usize = u32::MAX as usize;

    pub(crate) fn reset(&mut self, starts: &[usize], filled: usize) {
        let k = starts.len() - 1;
        self.slots.clear();
        self.slots.extend(
            (0..k).map(|i| AtomicU64::new(pack(starts[i], filled.clamp(starts[i], starts[i + 1])))),
        );
        self.readers.clear();
        self.readers.extend((0..k).map(|_| AtomicU32::new(0)));
        self.overflow_bucket.store(NONE, Ordering::Relaxed);
    }

    pub(crate) fn overflow_bucket(&self) -> Option<usize> {
        match self.overflow_bucket.load(Ordering::Acquire) {
            NONE => None,
            b => Some(b),
        }
    }

    /// Claims the last unplaced slot of `bucket`. The caller must call
    /// [`done_reading`](Self::done_reading) after copying it out.
    fn claim_read(&self, bucket: usize) -> Option<usize> {
        self.readers[bucket].fetch_add(1, Ordering::SeqCst);
        let cell = &self.slots[bucket];
        let mut cur = cell.load(Ordering::SeqCst);
        loop {
            let (w, r) = unpack(cur);
            if w >= r {
                self.readers[bucket].fetch_sub(1, Ordering::SeqCst);
                return None;
            }
            match cell.compare_exchange_weak(
                cur,
                pack(w, r - 1),
                Ordering::SeqCst,
                Ordering::SeqCst,
            ) {
                Ok(_) => return Some(r - 1),
                Err(actual) => cur = actual,
            }
        }
    }

    fn done_reading(&self, bucket: usize) {
        self.readers[bucket].fetch_sub(1, Ordering::Release);
    }

    /// Claims the next write slot; returns it with the read cursor seen at
    /// that moment.
    fn claim_write(&self, bucket: usize) -> (usize, usize) {
        unpack(self.slots[bucket].fetch_add(1 << 32, Ordering::SeqCst))
    }

    fn wait_for_readers(&self, bucket: usize) {
        let mut spins = 0u32;
        while self.readers[bucket].load(Ordering::Acquire) != 0 {
            spins += 1;
            if spins < 64 {
                std::hint::spin_loop();
            } else {
                std::thread::yield_now();
            }
        }
    }
}

/// One worker's share of the concurrent block permutation.
///
/// # Safety
/// `keys` must hold the gathered full blocks described by `cursors`, and
/// `overflow` must point to `block` writable keys. Every worker of the
/// same permutation must use the same `cursors`, `keys` and `overflow`.
#[allow(clippy::too_many_arguments)]
pub(crate) unsafe fn permute_worker<C: Classifier>(
    keys: SharedKeys,
    overflow: SharedKeys,
    model: &C,
    cursors: &Cursors,
    block: usize,
    worker: usize,
    workers: usize,
    held: &mut Vec<u64>,
) {
    let b = block;
    let n = keys.len;
    let k = cursors.slots.len();
    held.resize(b, 0);
    let first = worker * k / workers.max(1);
    for offset in 0..k {
        let bucket = (first + offset) % k;
        while let Some(slot) = cursors.claim_read(bucket) {
            held.copy_from_slice(keys.slice_mut(slot * b..(slot + 1) * b));
            cursors.done_reading(bucket);
            'chain: loop {
                let dest = model.classify(held[0]);
                loop {
                    let (w, r) = cursors.claim_write(dest);
                    if w < r {
                        let target = keys.slice_mut(w * b..(w + 1) * b);
                        if model.classify(target[0]) == dest {
                            continue;
                        }
                        target.swap_with_slice(held);
                        continue 'chain;
                    }
                    cursors.wait_for_readers(dest);
                    if (w + 1) * b > n {
                        overflow.slice_mut(0..b).copy_from_slice(held);
                        cursors.overflow_bucket.store(dest, Ordering::Release);
                    } else {
                        keys.slice_mut(w * b..(w + 1) * b).copy_from_slice(held);
                    }
                    break 'chain;
                }
            }
        }
    }
}
