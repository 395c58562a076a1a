use std::ops::Range;
use std::sync::{Arc, Barrier, Mutex, MutexGuard, RwLock};

use super::sequential::{children, sort_range};
use super::{with_model, PartitionModel, SortConfig, SortStats, SortTask, Worker};
use crate::partition::parallel::{
    gather_full_blocks, permute_worker, stripes, Cursors, SharedKeys,
};
use crate::partition::{aligned_starts, classify_and_block, flush_cleanup, BlockBuffers, Blocked};

/// One range partitioned by all workers together.
#[derive(Debug)]
struct Job {
    task: SortTask,
    model: PartitionModel,
    /// Per-worker pieces, relative to `task.start`.
    stripes: Vec<Range<usize>>,
}

#[derive(Debug, Default)]
struct LeaderState {
    full_blocks: Vec<usize>,
    counts: Vec<usize>,
    spill: Vec<u64>,
}

struct Pool<'a> {
    keys: SharedKeys,
    overflow: SharedKeys,
    cfg: &'a SortConfig,
    threads: usize,
    /// Ranges longer than this are partitioned cooperatively.
    coop_min: usize,
    barrier: Barrier,
    big: Mutex<Vec<SortTask>>,
    small: Mutex<Vec<SortTask>>,
    job: Mutex<Option<Arc<Job>>>,
    workers: Vec<Mutex<Worker>>,
    blocked: Vec<Mutex<Option<Blocked>>>,
    cursors: RwLock<Cursors>,
    leader: Mutex<LeaderState>,
}

/// Sorts with `cfg.threads` workers.
///
/// Ranges longer than `n / threads` are partitioned by all workers: each
/// classifies a stripe into private buffers, the leader gathers full blocks,
/// all workers permute blocks through shared atomic cursors, and the leader
/// finishes the bucket edges. Shorter ranges go to a shared pool, longest
/// first, and each is sorted by a single worker.
pub(crate) fn run_parallel(keys: &mut [u64], cfg: &SortConfig) -> SortStats {
    let n = keys.len();
    let t = cfg.threads;
    let b = cfg.partition.block_keys;
    if t <= 1 || n / b >= Cursors::MAX_SLOTS {
        return super::sort_recursive(keys, SortTask::new(0, n, 0), cfg);
    }
    let mut overflow = vec![0u64; b];
    let pool = Pool {
        keys: SharedKeys::new(keys),
        overflow: SharedKeys::new(&mut overflow),
        cfg,
        threads: t,
        coop_min: (n / t).max(cfg.radix_threshold),
        barrier: Barrier::new(t),
        big: Mutex::new(vec![SortTask::new(0, n, 0)]),
        small: Mutex::new(Vec::new()),
        job: Mutex::new(None),
        workers: (0..t).map(|_| Mutex::new(Worker::new(cfg))).collect(),
        blocked: (0..t).map(|_| Mutex::new(None)).collect(),
        cursors: RwLock::new(Cursors::default()),
        leader: Mutex::new(LeaderState::default()),
    };
    std::thread::scope(|s| {
        for id in 1..t {
            let pool = &pool;
            s.spawn(move || pool.run(id));
        }
        pool.run(0);
    });
    let mut stats = SortStats::default();
    for w in pool.workers {
        stats.merge(&w.into_inner().unwrap().finish());
    }
    stats
}

impl Pool<'_> {
    fn lock_worker(&self, id: usize) -> MutexGuard<'_, Worker> {
        self.workers[id].lock().unwrap()
    }

    fn run(&self, id: usize) {
        let b = self.cfg.partition.block_keys;
        let mut held = Vec::with_capacity(b);
        loop {
            if id == 0 {
                self.next_job();
            }
            self.barrier.wait();
            let Some(job) = self.job.lock().unwrap().clone() else {
                break;
            };
            let range = job.task.start..job.task.end;
            let keys = self.keys.sub(range.clone());

            let stripe = job.stripes[id].clone();
            {
                let mut w = self.lock_worker(id);
                // Stripes are disjoint.
                let part = unsafe { keys.slice_mut(stripe) };
                let blocked = with_model!(&job.model, |m| classify_and_block(
                    part,
                    m,
                    &mut w.scratch.buffers
                ));
                *self.blocked[id].lock().unwrap() = Some(blocked);
            }
            self.barrier.wait();

            if id == 0 {
                self.prepare_permutation(&job, keys);
            }
            self.barrier.wait();

            {
                let cursors = self.cursors.read().unwrap();
                // Slots are claimed through the cursors, so no two workers
                // touch the same block at once.
                unsafe {
                    with_model!(&job.model, |m| permute_worker(
                        keys,
                        self.overflow,
                        m,
                        &cursors,
                        b,
                        id,
                        self.threads,
                        &mut held
                    ));
                }
            }
            self.barrier.wait();

            if id == 0 {
                self.finish_partition(&job, keys);
            }
        }

        let mut w = self.lock_worker(id);
        loop {
            let Some(task) = self.small.lock().unwrap().pop() else {
                break;
            };
            // Pool tasks never overlap.
            let part = unsafe { self.keys.slice_mut(task.start..task.end) };
            sort_range(
                part,
                task.start,
                SortTask::new(0, task.len(), task.depth),
                self.cfg,
                &mut w,
            );
        }
    }

    /// Picks the next cooperative range and trains its model, or clears the
    /// job once only small ranges remain.
    fn next_job(&self) {
        let mut w = self.lock_worker(0);
        let mut big = self.big.lock().unwrap();
        let mut small = self.small.lock().unwrap();
        let mut job = None;
        while let Some(task) = big.pop() {
            if task.depth >= self.cfg.max_depth {
                small.push(task);
                continue;
            }
            // Other workers are parked at the barrier.
            let keys = unsafe { self.keys.slice_mut(task.start..task.end) };
            match w.train(keys, task.start, task.depth, self.cfg) {
                Some(model) => {
                    w.stats.max_depth = w.stats.max_depth.max(task.depth);
                    let stripes = stripes(task.len(), self.threads, self.cfg.partition.block_keys);
                    job = Some(Arc::new(Job {
                        task,
                        model,
                        stripes,
                    }));
                    break;
                }
                None => small.push(task),
            }
        }
        if job.is_none() {
            small.sort_unstable_by_key(|t| t.len());
        }
        *self.job.lock().unwrap() = job;
    }

    fn prepare_permutation(&self, job: &Job, keys: SharedKeys) {
        let b = self.cfg.partition.block_keys;
        let k = job.model_buckets();
        let blocked: Vec<Blocked> = self
            .blocked
            .iter()
            .map(|m| m.lock().unwrap().take().unwrap())
            .collect();
        let filled: Vec<usize> = blocked.iter().map(|x| x.filled_blocks).collect();
        let all = unsafe { keys.slice_mut(0..keys.len()) };
        let total = gather_full_blocks(all, &job.stripes, &filled, b);

        let mut leader = self.leader.lock().unwrap();
        leader.full_blocks.clear();
        leader.full_blocks.resize(k, 0);
        for x in &blocked {
            for (f, c) in leader.full_blocks.iter_mut().zip(&x.full_blocks) {
                *f += c;
            }
        }
        let guards: Vec<_> = (0..self.threads).map(|i| self.lock_worker(i)).collect();
        let counts: Vec<usize> = (0..k)
            .map(|i| {
                leader.full_blocks[i] * b
                    + guards
                        .iter()
                        .map(|g| g.scratch.buffers.residual_len(i))
                        .sum::<usize>()
            })
            .collect();
        self.cursors
            .write()
            .unwrap()
            .reset(&aligned_starts(&counts, b), total);
        leader.counts = counts;
    }

    fn finish_partition(&self, job: &Job, keys: SharedKeys) {
        let b = self.cfg.partition.block_keys;
        let all = unsafe { keys.slice_mut(0..keys.len()) };
        let overflow_bucket = self.cursors.read().unwrap().overflow_bucket();
        let overflow = unsafe { self.overflow.slice_mut(0..b) };
        let mut leader = self.leader.lock().unwrap();
        let LeaderState {
            full_blocks,
            counts,
            spill,
        } = &mut *leader;
        let mut guards: Vec<_> = (0..self.threads).map(|i| self.lock_worker(i)).collect();
        let layout = {
            let residuals: Vec<&BlockBuffers> = guards.iter().map(|g| &g.scratch.buffers).collect();
            flush_cleanup(
                all,
                full_blocks,
                counts,
                &residuals,
                overflow_bucket.map(|o| (o, &overflow[..])),
                b,
                spill,
            )
        };
        let w = &mut guards[0];
        w.stats.partitions += 1;
        w.stats.cooperative_partitions += 1;
        let next = children(&layout, all, job.task, w);
        drop(guards);
        let mut big = self.big.lock().unwrap();
        let mut small = self.small.lock().unwrap();
        for child in next {
            if child.len() > self.coop_min && child.len() < job.task.len() {
                big.push(child);
            } else {
                small.push(child);
            }
        }
    }
}

impl Job {
    fn model_buckets(&self) -> usize {
        use crate::Classifier;
        self.model.buckets()
    }
}
