use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PartitionConfig;
use crate::sorter::base::{radix_sort_with, DEFAULT_INSERTION_THRESHOLD};

/// Draws `cfg.sample_size(n)` keys uniformly with replacement and sorts them.
pub fn draw_sample(keys: &[u64], cfg: &PartitionConfig, seed: u64) -> Vec<u64> {
    let mut out = Vec::new();
    draw_sample_into(
        keys,
        cfg.sample_size(keys.len()),
        seed,
        &mut out,
        &mut Vec::new(),
    );
    out
}

pub fn draw_sample_into(
    keys: &[u64],
    count: usize,
    seed: u64,
    out: &mut Vec<u64>,
    radix_scratch: &mut Vec<u64>,
) {
    out.clear();
    if keys.is_empty() {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..count).map(|_| keys[rng.gen_range(0..keys.len())]));
    radix_sort_with(out, radix_scratch, DEFAULT_INSERTION_THRESHOLD);
}
