//! Partition buffers must not grow with the input length.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use ipls::datagen::{generate_keys, Dataset, DatasetSpec};
use ipls::partition::{draw_sample, partition, PartitionConfig, PartitionScratch};
use ipls::{fmcd_train, sort_u64_with, SortConfig};

struct Counting;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let live = LIVE.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
        PEAK.fetch_max(live, Ordering::SeqCst);
        System.alloc(layout)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        LIVE.fetch_sub(layout.size(), Ordering::SeqCst);
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// Bytes allocated on top of what was live before `f` ran.
fn peak_extra<R>(f: impl FnOnce() -> R) -> (usize, R) {
    let base = LIVE.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let r = f();
    (PEAK.load(Ordering::SeqCst) - base, r)
}

#[test]
fn partition_memory_is_independent_of_n() {
    let cfg = PartitionConfig::default();
    let (k, b) = (cfg.buckets, cfg.block_keys);
    let mut peaks = Vec::new();
    for n in [100_000, 1_000_000, 4_000_000] {
        let mut keys = generate_keys(&DatasetSpec::new(Dataset::Uniform, n, 1)).unwrap();
        let sample = draw_sample(&keys, &cfg, 9);
        let model = fmcd_train::<f64>(&sample, k).unwrap().model;
        let (peak, _) = peak_extra(|| {
            let mut scratch = PartitionScratch::new(k, b);
            partition(&mut keys, &model, &mut scratch)
        });
        peaks.push(peak);
    }
    // Staging blocks dominate: k blocks of b keys, plus a few blocks and
    // per-bucket counters. Spill growth may differ by less than a block.
    let bound = (k * b + 4 * b + 16 * k) * 8;
    assert!(peaks.iter().all(|&p| p <= bound), "{peaks:?} > {bound}");
    let spread = peaks.iter().max().unwrap() - peaks.iter().min().unwrap();
    assert!(spread < b * 8, "{peaks:?}");
}

#[test]
fn sorter_memory_is_far_below_n() {
    for n in [1_000_000usize, 4_000_000] {
        let mut keys =
            generate_keys(&DatasetSpec::new("lognormal".parse().unwrap(), n, 2)).unwrap();
        let (peak, stats) = peak_extra(|| sort_u64_with(&mut keys, &SortConfig::default()));
        assert!(peak < 2 << 20, "n={n}: {peak} bytes");
        assert!(stats.peak_aux_bytes <= peak);
    }
}
