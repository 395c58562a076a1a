//! In-place block partitioning.
//!
//! Partitioning runs in three phases:
//!
//! 1. [`classify_and_block`] streams the keys through one staging block per
//!    bucket, writing each block back to the front of the array as it fills.
//! 2. [`permute_blocks`] moves the full blocks into block-aligned bucket
//!    regions.
//! 3. [`flush_cleanup`] shifts the region edges into place and writes the
//!    leftover staged keys, producing exact, contiguous buckets.
//!
//! Auxiliary memory is `O(k * b)` for `k` buckets of `b`-key blocks,
//! regardless of the input length. Sampling adds `O(alpha * k)`.

mod buffers;
mod classify;
mod cleanup;
mod config;
pub(crate) mod parallel;
mod permute;
mod sample;

pub use buffers::BlockBuffers;
pub use classify::{classify_and_block, Blocked};
pub use cleanup::flush_cleanup;
pub use config::{
    BucketLayout, Oversampling, PartitionConfig, DEFAULT_BLOCK_KEYS, DEFAULT_BUCKETS,
    DEFAULT_OVERSAMPLING,
};
pub use permute::{aligned_starts, permute_blocks, PermuteScratch};
pub use sample::{draw_sample, draw_sample_into};

use crate::Classifier;

/// Reusable buffers for one partitioning worker.
#[derive(Debug, Clone, Default)]
pub struct PartitionScratch {
    pub(crate) buffers: BlockBuffers,
    pub(crate) permute: PermuteScratch,
    pub(crate) spill: Vec<u64>,
}

impl PartitionScratch {
    pub fn new(buckets: usize, block: usize) -> Self {
        Self {
            buffers: BlockBuffers::new(buckets, block),
            permute: PermuteScratch::new(block),
            spill: Vec::with_capacity(block),
        }
    }

    pub fn block(&self) -> usize {
        self.buffers.block()
    }

    pub fn capacity_bytes(&self) -> usize {
        self.buffers.capacity_bytes() + self.permute.capacity_bytes() + self.spill.capacity() * 8
    }
}

/// Runs all three phases. Afterwards every key in region `i` of the
/// returned layout satisfies `model.classify(key) == i`.
pub fn partition<C: Classifier>(
    keys: &mut [u64],
    model: &C,
    scratch: &mut PartitionScratch,
) -> BucketLayout {
    let block = scratch.block();
    let blocked = classify_and_block(keys, model, &mut scratch.buffers);
    let counts = blocked.counts(&[&scratch.buffers]);
    let overflow = permute_blocks(keys, model, &blocked, &counts, block, &mut scratch.permute);
    flush_cleanup(
        keys,
        &blocked.full_blocks,
        &counts,
        &[&scratch.buffers],
        overflow.map(|b| (b, scratch.permute.overflow())),
        block,
        &mut scratch.spill,
    )
}

/// True iff all keys in the region are equal.
pub fn homogeneity_check(region: &[u64]) -> bool {
    match region.first() {
        Some(&first) => region.iter().all(|&k| k == first),
        None => true,
    }
}
