use super::Blocked;
use crate::Classifier;

/// First block slot of each bucket's region: `ceil(boundary / block)`.
/// Bucket `i` owns slots `starts[i]..starts[i + 1]`, which is always enough
/// for its full blocks.
pub fn aligned_starts(counts: &[usize], block: usize) -> Vec<usize> {
    let mut starts = Vec::with_capacity(counts.len() + 1);
    let mut sum = 0;
    starts.push(0);
    for &c in counts {
        sum += c;
        starts.push(sum.div_ceil(block));
    }
    starts
}

#[derive(Debug, Clone, Default)]
pub struct PermuteScratch {
    held: Vec<u64>,
    overflow: Vec<u64>,
    write: Vec<usize>,
    read: Vec<usize>,
}

impl PermuteScratch {
    pub fn new(block: usize) -> Self {
        Self {
            held: vec![0; block],
            overflow: vec![0; block],
            write: Vec::new(),
            read: Vec::new(),
        }
    }

    /// Block that belongs to a slot straddling the end of the array.
    pub fn overflow(&self) -> &[u64] {
        &self.overflow
    }

    pub fn capacity_bytes(&self) -> usize {
        (self.held.capacity()
            + self.overflow.capacity()
            + self.write.capacity()
            + self.read.capacity())
            * 8
    }
}

/// Moves full blocks so that every bucket's blocks sit at the start of its
/// block-aligned region.
///
/// Each bucket keeps a write slot and a read slot; slots in
/// `write..read` still hold unplaced blocks. A block taken from a read slot
/// is swapped into the write slot of its bucket, and the displaced block
/// continues the chain until it lands on an empty slot. A slot that would
/// run past the end of the array is redirected to the overflow block.
///
/// Returns the bucket whose last block went to the overflow block, if any.
pub fn permute_blocks<C: Classifier>(
    keys: &mut [u64],
    model: &C,
    blocked: &Blocked,
    counts: &[usize],
    block: usize,
    scratch: &mut PermuteScratch,
) -> Option<usize> {
    let k = counts.len();
    let b = block;
    let n = keys.len();
    let starts = aligned_starts(counts, b);
    scratch.held.resize(b, 0);
    scratch.overflow.resize(b, 0);
    let PermuteScratch {
        held,
        overflow,
        write,
        read,
    } = scratch;
    write.clear();
    write.extend_from_slice(&starts[..k]);
    read.clear();
    read.extend((0..k).map(|i| blocked.filled_blocks.clamp(starts[i], starts[i + 1])));

    let mut overflow_bucket = None;
    for bucket in 0..k {
        while write[bucket] < read[bucket] {
            read[bucket] -= 1;
            let slot = read[bucket];
            held.copy_from_slice(&keys[slot * b..(slot + 1) * b]);
            loop {
                let dest = model.classify(held[0]);
                while write[dest] < read[dest] && model.classify(keys[write[dest] * b]) == dest {
                    write[dest] += 1;
                }
                let w = write[dest];
                write[dest] += 1;
                if w < read[dest] {
                    keys[w * b..(w + 1) * b].swap_with_slice(held);
                } else if (w + 1) * b > n {
                    overflow.copy_from_slice(held);
                    overflow_bucket = Some(dest);
                    break;
                } else {
                    keys[w * b..(w + 1) * b].copy_from_slice(held);
                    break;
                }
            }
        }
    }
    overflow_bucket
}
