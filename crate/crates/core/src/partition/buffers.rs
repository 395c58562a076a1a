/// One staging block per bucket. A buffer is flushed to the array exactly
/// when it fills; whatever is left at the end is the bucket's residual.
#[derive(Debug, Clone, Default)]
pub struct BlockBuffers {
    data: Vec<u64>,
    fill: Vec<usize>,
    block: usize,
}

impl BlockBuffers {
    pub fn new(buckets: usize, block: usize) -> Self {
        let mut b = Self::default();
        b.reset(buckets, block);
        b
    }

    /// Empties all buffers, growing storage if the shape got larger.
    pub fn reset(&mut self, buckets: usize, block: usize) {
        self.block = block;
        if self.data.len() < buckets * block {
            self.data.resize(buckets * block, 0);
        }
        self.fill.clear();
        self.fill.resize(buckets, 0);
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn buckets(&self) -> usize {
        self.fill.len()
    }

    pub fn residual(&self, bucket: usize) -> &[u64] {
        let start = bucket * self.block;
        &self.data[start..start + self.fill[bucket]]
    }

    pub fn residual_len(&self, bucket: usize) -> usize {
        self.fill[bucket]
    }

    pub fn staged(&self) -> usize {
        self.fill.iter().sum()
    }

    pub fn capacity_bytes(&self) -> usize {
        (self.data.capacity() + self.fill.capacity()) * 8
    }

    /// Stages `key` in `bucket`. Returns the full block when this push
    /// completed it; the buffer then counts as empty.
    #[inline(always)]
    pub(crate) fn push(&mut self, bucket: usize, key: u64) -> Option<&[u64]> {
        let f = self.fill[bucket];
        let start = bucket * self.block;
        self.data[start + f] = key;
        if f + 1 == self.block {
            self.fill[bucket] = 0;
            Some(&self.data[start..start + self.block])
        } else {
            self.fill[bucket] = f + 1;
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flushes_exactly_when_full() {
        let mut b = BlockBuffers::new(3, 2);
        assert!(b.push(1, 10).is_none());
        assert_eq!(b.push(1, 11), Some(&[10u64, 11][..]));
        assert_eq!(b.residual_len(1), 0);
        assert!(b.push(2, 5).is_none());
        assert_eq!(b.residual(2), &[5]);
        assert_eq!(b.staged(), 1);
        b.reset(4, 2);
        assert_eq!(b.staged(), 0);
        assert_eq!(b.buckets(), 4);
    }
}
