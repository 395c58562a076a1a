use super::{Classifier, BATCH};
use crate::{Error, Result};

/// Complete binary search tree over `2^depth - 1` splitters, stored as an
/// implicit heap: node `j` (one-indexed) has children `2j` and `2j + 1`.
///
/// Descent is branchless, `j = 2j + (x > splitter[j])`; keys equal to a
/// splitter go left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTreeClassifier {
    // Slot 0 is padding so the heap can be indexed from one.
    heap: Vec<u64>,
    depth: u32,
}

impl DecisionTreeClassifier {
    /// Picks `2^depth - 1` equidistant splitters from sorted candidates.
    pub fn build(sorted_candidates: &[u64], depth: u32) -> Result<Self> {
        if depth == 0 || depth > 30 {
            return Err(Error::InvalidModel(format!(
                "tree depth {depth} out of range 1..=30"
            )));
        }
        let buckets = 1usize << depth;
        let needed = buckets - 1;
        let m = sorted_candidates.len();
        if m < needed {
            return Err(Error::InsufficientCandidates { needed, got: m });
        }
        let splitters: Vec<u64> = (1..buckets)
            .map(|i| sorted_candidates[i * m / buckets])
            .collect();
        let mut heap = vec![0; buckets];
        fill_heap(&splitters, &mut heap, 1);
        Ok(Self { heap, depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn buckets(&self) -> usize {
        1 << self.depth
    }

    /// Splitters in heap order (without the padding slot).
    pub fn heap(&self) -> &[u64] {
        &self.heap[1..]
    }

    /// Splitters in sorted order.
    pub fn in_order(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.heap.len() - 1);
        in_order(&self.heap, 1, &mut out);
        out
    }

    #[inline]
    pub fn predict(&self, key: u64) -> usize {
        let mut j = 1usize;
        for _ in 0..self.depth {
            j = 2 * j + (key > self.heap[j]) as usize;
        }
        j - self.buckets()
    }

    /// Same result as mapping [`predict`](Self::predict), eight keys at a
    /// time so the independent descents overlap.
    pub fn predict_batch(&self, keys: &[u64], out: &mut Vec<usize>) {
        out.clear();
        out.reserve(keys.len());
        let mut chunks = keys.chunks_exact(BATCH);
        let mut lanes = [0usize; BATCH];
        for chunk in &mut chunks {
            self.descend(chunk.try_into().unwrap(), &mut lanes);
            out.extend_from_slice(&lanes);
        }
        out.extend(chunks.remainder().iter().map(|&k| self.predict(k)));
    }

    #[inline(always)]
    fn descend(&self, keys: &[u64; BATCH], out: &mut [usize; BATCH]) {
        let mut j = [1usize; BATCH];
        for _ in 0..self.depth {
            for l in 0..BATCH {
                j[l] = 2 * j[l] + (keys[l] > self.heap[j[l]]) as usize;
            }
        }
        let k = self.buckets();
        for l in 0..BATCH {
            out[l] = j[l] - k;
        }
    }
}

fn fill_heap(sorted: &[u64], heap: &mut [u64], node: usize) {
    if sorted.is_empty() {
        return;
    }
    let mid = sorted.len() / 2;
    heap[node] = sorted[mid];
    fill_heap(&sorted[..mid], heap, 2 * node);
    fill_heap(&sorted[mid + 1..], heap, 2 * node + 1);
}

fn in_order(heap: &[u64], node: usize, out: &mut Vec<u64>) {
    if node >= heap.len() {
        return;
    }
    in_order(heap, 2 * node, out);
    out.push(heap[node]);
    in_order(heap, 2 * node + 1, out);
}

impl Classifier for DecisionTreeClassifier {
    fn buckets(&self) -> usize {
        1 << self.depth
    }

    #[inline]
    fn classify(&self, key: u64) -> usize {
        self.predict(key)
    }

    #[inline]
    fn classify_batch(&self, keys: &[u64; BATCH], out: &mut [usize; BATCH]) {
        self.descend(keys, out);
    }
}

pub fn tree_build(sorted_candidates: &[u64], depth: u32) -> Result<DecisionTreeClassifier> {
    DecisionTreeClassifier::build(sorted_candidates, depth)
}

pub fn tree_predict(tree: &DecisionTreeClassifier, key: u64) -> usize {
    tree.predict(key)
}

pub fn tree_predict_batch(tree: &DecisionTreeClassifier, keys: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    tree.predict_batch(keys, &mut out);
    out
}
