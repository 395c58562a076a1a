use crate::{Error, Result};

pub const DEFAULT_BUCKETS: usize = 256;
/// 256 keys, 2 KiB per block.
pub const DEFAULT_BLOCK_KEYS: usize = 256;
pub const DEFAULT_OVERSAMPLING: f64 = 0.2;

/// Oversampling factor `alpha`; the sample holds `ceil(alpha) * k - 1` keys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oversampling {
    /// `alpha = factor * log2(n)`.
    LogScaled(f64),
    Fixed(f64),
}

impl Default for Oversampling {
    fn default() -> Self {
        Oversampling::LogScaled(DEFAULT_OVERSAMPLING)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    /// Bucket count `k`.
    pub buckets: usize,
    pub oversampling: Oversampling,
    /// Keys per block `b`; each bucket buffers one block.
    pub block_keys: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            buckets: DEFAULT_BUCKETS,
            oversampling: Oversampling::default(),
            block_keys: DEFAULT_BLOCK_KEYS,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.buckets < 3 {
            return Err(Error::InvalidModel(format!(
                "{} buckets, need at least 3",
                self.buckets
            )));
        }
        if self.block_keys == 0 {
            return Err(Error::InvalidModel("block size must be positive".into()));
        }
        let alpha = match self.oversampling {
            Oversampling::LogScaled(f) | Oversampling::Fixed(f) => f,
        };
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidModel(format!(
                "oversampling {alpha} must be > 0"
            )));
        }
        Ok(())
    }

    pub fn alpha(&self, n: usize) -> f64 {
        match self.oversampling {
            Oversampling::LogScaled(f) => f * (n.max(2) as f64).log2(),
            Oversampling::Fixed(a) => a,
        }
    }

    pub fn sample_size(&self, n: usize) -> usize {
        let alpha = (self.alpha(n).ceil() as usize).max(1);
        alpha * self.buckets - 1
    }
}

/// Bucket sizes and region boundaries after partitioning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketLayout {
    pub counts: Vec<usize>,
    /// `k + 1` offsets: bucket `i` occupies `boundaries[i]..boundaries[i + 1]`.
    pub boundaries: Vec<usize>,
}

impl BucketLayout {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        let mut boundaries = Vec::with_capacity(counts.len() + 1);
        let mut sum = 0;
        boundaries.push(0);
        for &c in &counts {
            sum += c;
            boundaries.push(sum);
        }
        Self { counts, boundaries }
    }

    pub fn buckets(&self) -> usize {
        self.counts.len()
    }

    pub fn region(&self, bucket: usize) -> std::ops::Range<usize> {
        self.boundaries[bucket]..self.boundaries[bucket + 1]
    }

    pub fn len(&self) -> usize {
        *self.boundaries.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_for_a_million_keys() {
        let cfg = PartitionConfig::default();
        assert_eq!(cfg.sample_size(1 << 20), 1023);
        assert_eq!(cfg.sample_size(4097), 767);
        let fixed = PartitionConfig {
            buckets: 4,
            oversampling: Oversampling::Fixed(2.0),
            block_keys: 2,
        };
        assert_eq!(fixed.sample_size(20), 7);
    }

    #[test]
    fn validation() {
        assert!(PartitionConfig::default().validate().is_ok());
        let d = PartitionConfig::default;
        assert!(PartitionConfig { buckets: 2, ..d() }.validate().is_err());
        assert!(PartitionConfig {
            block_keys: 0,
            ..d()
        }
        .validate()
        .is_err());
        let c = PartitionConfig {
            oversampling: Oversampling::Fixed(0.0),
            ..d()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn layout_boundaries() {
        let l = BucketLayout::from_counts(vec![7, 2, 0, 4, 7]);
        assert_eq!(l.boundaries, vec![0, 7, 9, 9, 13, 20]);
        assert_eq!(l.region(2), 9..9);
        assert_eq!(l.len(), 20);
    }
}
