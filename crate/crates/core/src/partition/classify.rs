use super::BlockBuffers;
use crate::models::BATCH;
use crate::Classifier;

/// Array state after classification: the first `filled_blocks` blocks of
/// the array are full, bucket-homogeneous blocks in no particular order;
/// the rest of each bucket sits in its staging buffer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Blocked {
    pub full_blocks: Vec<usize>,
    pub filled_blocks: usize,
}

impl Blocked {
    /// Keys per bucket, counting the residuals still in `buffers`.
    pub fn counts(&self, buffers: &[&BlockBuffers]) -> Vec<usize> {
        let block = buffers.first().map_or(0, |b| b.block());
        self.full_blocks
            .iter()
            .enumerate()
            .map(|(i, &f)| f * block + buffers.iter().map(|b| b.residual_len(i)).sum::<usize>())
            .collect()
    }
}

/// Classifies every key and writes full blocks back to the front of `keys`.
///
/// The write cursor never passes the read cursor: a block is flushed only
/// after at least `block` more keys have been read than written.
pub fn classify_and_block<C: Classifier>(
    keys: &mut [u64],
    model: &C,
    buffers: &mut BlockBuffers,
) -> Blocked {
    let k = model.buckets();
    let b = buffers.block();
    buffers.reset(k, b);
    let mut full_blocks = vec![0usize; k];
    let mut write = 0usize;
    let n = keys.len();

    let mut flush = |keys: &mut [u64], bucket: usize, key: u64, write: &mut usize| {
        if let Some(block) = buffers.push(bucket, key) {
            keys[*write..*write + b].copy_from_slice(block);
            *write += b;
            full_blocks[bucket] += 1;
        }
    };

    let mut lanes = [0usize; BATCH];
    let mut i = 0;
    while i + BATCH <= n {
        let batch: [u64; BATCH] = keys[i..i + BATCH].try_into().unwrap();
        model.classify_batch(&batch, &mut lanes);
        for l in 0..BATCH {
            flush(keys, lanes[l], batch[l], &mut write);
        }
        i += BATCH;
    }
    while i < n {
        let key = keys[i];
        flush(keys, model.classify(key), key, &mut write);
        i += 1;
    }
    Blocked {
        full_blocks,
        filled_blocks: write / b,
    }
}
