//! Recursive learned sort over `u64` keys, sequential and parallel.

pub mod base;
mod parallel;
mod sequential;

pub use base::{insertion_sort, radix_base_case, radix_sort_with, DEFAULT_INSERTION_THRESHOLD};
pub use sequential::sort_recursive;

use crate::keys::{decode_float, encode_bits, find_nan};
use crate::models::{fmcd_train, Classifier, DecisionTreeClassifier, LinearPartitionModel, BATCH};
use crate::partition::{draw_sample_into, PartitionConfig, PartitionScratch};
use crate::verify::mix;
use crate::{Error, Result};

pub const DEFAULT_RADIX_THRESHOLD: usize = 1 << 12;
pub const DEFAULT_MAX_DEPTH: usize = 64;
/// Inputs shorter than this are sorted sequentially even when threads are
/// requested.
pub const DEFAULT_PARALLEL_CUTOFF: usize = 1 << 20;

/// Model family used to partition each range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelKind {
    /// FMCD linear model, with a decision tree when the sample is degenerate.
    #[default]
    Fmcd,
    DecisionTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortConfig {
    pub partition: PartitionConfig,
    pub insertion_threshold: usize,
    /// Ranges up to this length go to the radix base case.
    pub radix_threshold: usize,
    pub max_depth: usize,
    pub threads: usize,
    pub seed: u64,
    pub model: ModelKind,
    /// Set to 0 to force the parallel path for any input length.
    pub parallel_cutoff: usize,
}

impl Default for SortConfig {
    fn default() -> Self {
        Self {
            partition: PartitionConfig::default(),
            insertion_threshold: DEFAULT_INSERTION_THRESHOLD,
            radix_threshold: DEFAULT_RADIX_THRESHOLD,
            max_depth: DEFAULT_MAX_DEPTH,
            threads: 1,
            seed: 0x1b5_5eed,
            model: ModelKind::Fmcd,
            parallel_cutoff: DEFAULT_PARALLEL_CUTOFF,
        }
    }
}

impl SortConfig {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.partition.validate()?;
        if self.insertion_threshold > self.radix_threshold {
            return Err(Error::InvalidModel(format!(
                "insertion threshold {} exceeds radix threshold {}",
                self.insertion_threshold, self.radix_threshold
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidModel("max_depth must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidModel(
                "thread count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A contiguous range still to be sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SortTask {
    pub start: usize,
    pub end: usize,
    pub depth: usize,
}

impl SortTask {
    pub fn new(start: usize, end: usize, depth: usize) -> Self {
        assert!(start <= end);
        Self { start, end, depth }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Counters collected while sorting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortStats {
    pub partitions: usize,
    /// Partitions run cooperatively by all workers.
    pub cooperative_partitions: usize,
    pub homogeneous_buckets: usize,
    /// Deepest level at which a range was partitioned or base-sorted.
    pub max_depth: usize,
    pub insertion_calls: usize,
    pub radix_calls: usize,
    pub depth_cap_fallbacks: usize,
    pub tree_fallbacks: usize,
    /// Partitions that left every key in one bucket; that range is then
    /// radix sorted.
    pub no_progress_fallbacks: usize,
    /// Peak bytes of auxiliary buffers held by any single worker.
    pub peak_aux_bytes: usize,
}

impl SortStats {
    fn merge(&mut self, o: &SortStats) {
        self.partitions += o.partitions;
        self.cooperative_partitions += o.cooperative_partitions;
        self.homogeneous_buckets += o.homogeneous_buckets;
        self.max_depth = self.max_depth.max(o.max_depth);
        self.insertion_calls += o.insertion_calls;
        self.radix_calls += o.radix_calls;
        self.depth_cap_fallbacks += o.depth_cap_fallbacks;
        self.tree_fallbacks += o.tree_fallbacks;
        self.no_progress_fallbacks += o.no_progress_fallbacks;
        self.peak_aux_bytes = self.peak_aux_bytes.max(o.peak_aux_bytes);
    }
}

/// Sorts with the default configuration.
pub fn sort_u64(keys: &mut [u64]) {
    sort_u64_with(keys, &SortConfig::default());
}

/// Sorts `keys` and reports what the recursion did.
///
/// # Panics
/// If `cfg` fails [`SortConfig::validate`].
pub fn sort_u64_with(keys: &mut [u64], cfg: &SortConfig) -> SortStats {
    if let Err(e) = cfg.validate() {
        panic!("invalid sort configuration: {e}");
    }
    if cfg.threads > 1 && keys.len() >= cfg.parallel_cutoff.max(1) {
        parallel::run_parallel(keys, cfg)
    } else {
        sort_recursive(keys, SortTask::new(0, keys.len(), 0), cfg)
    }
}

/// Sorts doubles numerically. Fails without touching `keys` if any is NaN.
pub fn sort_f64(keys: &mut [f64]) -> Result<()> {
    sort_f64_with(keys, &SortConfig::default()).map(|_| ())
}

pub fn sort_f64_with(keys: &mut [f64], cfg: &SortConfig) -> Result<SortStats> {
    if let Some(index) = find_nan(keys) {
        return Err(Error::NanKey { index });
    }
    cfg.validate()?;
    // f64 and u64 share size and alignment, so the slice is encoded in place.
    let bits: &mut [u64] =
        unsafe { std::slice::from_raw_parts_mut(keys.as_mut_ptr().cast(), keys.len()) };
    for b in bits.iter_mut() {
        *b = encode_bits(f64::from_bits(*b));
    }
    let stats = sort_u64_with(bits, cfg);
    for b in bits.iter_mut() {
        *b = decode_float(*b).to_bits();
    }
    Ok(stats)
}

/// The model chosen for one range.
#[derive(Debug, Clone)]
pub(crate) enum PartitionModel {
    Linear(LinearPartitionModel<f64>),
    Tree(DecisionTreeClassifier),
}

impl Classifier for PartitionModel {
    fn buckets(&self) -> usize {
        match self {
            PartitionModel::Linear(m) => m.buckets(),
            PartitionModel::Tree(t) => t.buckets(),
        }
    }

    fn classify(&self, key: u64) -> usize {
        match self {
            PartitionModel::Linear(m) => m.classify(key),
            PartitionModel::Tree(t) => t.classify(key),
        }
    }

    fn classify_batch(&self, keys: &[u64; BATCH], out: &mut [usize; BATCH]) {
        match self {
            PartitionModel::Linear(m) => m.classify_batch(keys, out),
            PartitionModel::Tree(t) => t.classify_batch(keys, out),
        }
    }
}

/// Runs `f` with the concrete model type so the hot loops are monomorphic.
macro_rules! with_model {
    ($model:expr, |$m:ident| $body:expr) => {
        match $model {
            $crate::sorter::PartitionModel::Linear($m) => $body,
            $crate::sorter::PartitionModel::Tree($m) => $body,
        }
    };
}
pub(crate) use with_model;

fn task_seed(seed: u64, start: usize, depth: usize) -> u64 {
    mix(seed ^ mix(start as u64 ^ ((depth as u64) << 56)))
}

/// Buffers and counters owned by one sorting thread.
#[derive(Debug)]
pub(crate) struct Worker {
    pub(crate) scratch: PartitionScratch,
    sample: Vec<u64>,
    radix: Vec<u64>,
    pub(crate) stats: SortStats,
}

impl Worker {
    pub(crate) fn new(cfg: &SortConfig) -> Self {
        Self {
            scratch: PartitionScratch::new(cfg.partition.buckets, cfg.partition.block_keys),
            sample: Vec::new(),
            radix: Vec::new(),
            stats: SortStats::default(),
        }
    }

    fn aux_bytes(&self) -> usize {
        self.scratch.capacity_bytes() + (self.sample.capacity() + self.radix.capacity()) * 8
    }

    pub(crate) fn note_memory(&mut self) {
        self.stats.peak_aux_bytes = self.stats.peak_aux_bytes.max(self.aux_bytes());
    }

    pub(crate) fn finish(mut self) -> SortStats {
        self.note_memory();
        self.stats
    }

    /// Samples `keys` and fits the configured model; `None` when the range
    /// is too small to sample.
    pub(crate) fn train(
        &mut self,
        keys: &[u64],
        start: usize,
        depth: usize,
        cfg: &SortConfig,
    ) -> Option<PartitionModel> {
        let n = keys.len();
        let k = cfg.partition.buckets;
        let size = cfg.partition.sample_size(n);
        if size < crate::models::MIN_SAMPLE || size >= n {
            return None;
        }
        draw_sample_into(
            keys,
            size,
            task_seed(cfg.seed, start, depth),
            &mut self.sample,
            &mut self.radix,
        );
        if cfg.model == ModelKind::Fmcd {
            if let Ok(fit) = fmcd_train::<f64>(&self.sample, k) {
                return Some(PartitionModel::Linear(fit.model));
            }
            self.stats.tree_fallbacks += 1;
        }
        let levels = k.ilog2().min(30);
        DecisionTreeClassifier::build(&self.sample, levels)
            .ok()
            .map(PartitionModel::Tree)
    }

    /// Sorts a range with a base case, counting the call.
    pub(crate) fn base_sort(&mut self, keys: &mut [u64], cfg: &SortConfig) {
        if keys.len() <= cfg.insertion_threshold {
            self.stats.insertion_calls += 1;
            insertion_sort(keys);
        } else {
            self.stats.radix_calls += 1;
            radix_sort_with(keys, &mut self.radix, cfg.insertion_threshold);
        }
        self.note_memory();
        if self.radix.capacity() > cfg.radix_threshold {
            self.radix = Vec::new();
        }
    }
}
