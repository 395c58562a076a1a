use super::permute::aligned_starts;
use super::{BlockBuffers, BucketLayout};

/// Turns block-aligned bucket regions into exact ones.
///
/// Bucket `i` must end up in `boundaries[i]..boundaries[i + 1]`. Its blocks
/// start at the aligned slot at or after its boundary, so there may be a gap
/// at the head of the region, a gap at the tail, and up to one block's worth
/// of keys spilling into the next bucket's head gap. Buckets are processed
/// left to right: the spill is picked up before the next bucket fills its
/// head, then the spill and the staged residual keys are written into the
/// gaps.
pub fn flush_cleanup(
    keys: &mut [u64],
    full_blocks: &[usize],
    counts: &[usize],
    residuals: &[&BlockBuffers],
    overflow: Option<(usize, &[u64])>,
    block: usize,
    spill: &mut Vec<u64>,
) -> BucketLayout {
    let b = block;
    let layout = BucketLayout::from_counts(counts.to_vec());
    let starts = aligned_starts(counts, b);
    for bucket in 0..counts.len() {
        let (s, e) = (layout.boundaries[bucket], layout.boundaries[bucket + 1]);
        let a = starts[bucket] * b;
        let end = a + full_blocks[bucket] * b;

        spill.clear();
        match overflow {
            Some((ob, ovf)) if ob == bucket => {
                // The last block lives in the overflow buffer.
                let ovf_start = end - b;
                let in_range = e.min(end);
                if in_range > ovf_start {
                    keys[ovf_start..in_range].copy_from_slice(&ovf[..in_range - ovf_start]);
                }
                let from = e.max(a);
                if from < ovf_start {
                    spill.extend_from_slice(&keys[from..ovf_start]);
                }
                spill.extend_from_slice(&ovf[from.max(ovf_start) - ovf_start..]);
            }
            _ => {
                if end > e.max(a) {
                    spill.extend_from_slice(&keys[e.max(a)..end]);
                }
            }
        }

        let head = s..a.min(e);
        let tail = end.max(s).min(e)..e;
        let mut sources = spill
            .iter()
            .chain(residuals.iter().flat_map(|r| r.residual(bucket)))
            .copied();
        for slot in head.chain(tail) {
            keys[slot] = sources.next().expect("cleanup ran out of keys");
        }
        debug_assert!(sources.next().is_none());
    }
    layout
}
