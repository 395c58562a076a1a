use super::{with_model, SortConfig, SortStats, SortTask, Worker};
use crate::partition::{homogeneity_check, partition, BucketLayout};

/// Sorts `keys[task.start..task.end]` with one thread.
pub fn sort_recursive(keys: &mut [u64], task: SortTask, cfg: &SortConfig) -> SortStats {
    let mut worker = Worker::new(cfg);
    sort_range(keys, 0, task, cfg, &mut worker);
    worker.finish()
}

/// Task offsets are relative to `keys`; `base` is the offset of `keys` in
/// the whole input and only feeds the per-range sampling seed.
pub(crate) fn sort_range(
    keys: &mut [u64],
    base: usize,
    task: SortTask,
    cfg: &SortConfig,
    worker: &mut Worker,
) {
    let mut stack = vec![task];
    while let Some(t) = stack.pop() {
        let range = &mut keys[t.start..t.end];
        let n = range.len();
        worker.stats.max_depth = worker.stats.max_depth.max(t.depth);
        if n <= cfg.radix_threshold {
            worker.base_sort(range, cfg);
            continue;
        }
        if t.depth >= cfg.max_depth {
            worker.stats.depth_cap_fallbacks += 1;
            worker.base_sort(range, cfg);
            continue;
        }
        let Some(model) = worker.train(range, base + t.start, t.depth, cfg) else {
            worker.base_sort(range, cfg);
            continue;
        };
        let layout = with_model!(&model, |m| partition(range, m, &mut worker.scratch));
        worker.stats.partitions += 1;
        worker.note_memory();
        for child in children(&layout, range, t, worker) {
            if child.len() == n {
                worker.stats.no_progress_fallbacks += 1;
                worker.base_sort(range, cfg);
            } else {
                stack.push(child);
            }
        }
    }
}

/// Buckets of a partitioned range that still need sorting, largest offset
/// first so the stack pops them left to right.
pub(crate) fn children(
    layout: &BucketLayout,
    range: &[u64],
    parent: SortTask,
    worker: &mut Worker,
) -> Vec<SortTask> {
    let mut out = Vec::new();
    for i in (0..layout.buckets()).rev() {
        let r = layout.region(i);
        if r.len() <= 1 {
            continue;
        }
        if homogeneity_check(&range[r.clone()]) {
            worker.stats.homogeneous_buckets += 1;
            continue;
        }
        out.push(SortTask::new(
            parent.start + r.start,
            parent.start + r.end,
            parent.depth + 1,
        ));
    }
    out
}
