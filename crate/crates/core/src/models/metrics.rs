use crate::{Error, Result, Scalar};

/// Balance and accuracy measures for a partition of `n` keys into `k` buckets.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionMetrics<F> {
    /// Sum over buckets of `(|B_i| - n / k)^2`.
    pub variance_from_mean: F,
    pub max_bucket: usize,
    /// Mean squared error between predicted and empirical eCDF values.
    pub ecdf_mse: Option<F>,
}

pub fn compute_metrics<F: Scalar>(
    bucket_sizes: &[usize],
    n: usize,
    k: usize,
    ecdf_pairs: Option<&[(F, F)]>,
) -> Result<PartitionMetrics<F>> {
    if bucket_sizes.len() != k {
        return Err(Error::SizeMismatch(format!(
            "{} bucket sizes for {k} buckets",
            bucket_sizes.len()
        )));
    }
    let total: usize = bucket_sizes.iter().sum();
    if total != n {
        return Err(Error::SizeMismatch(format!(
            "bucket sizes sum to {total}, expected {n}"
        )));
    }
    let mean = F::from_count(n) / F::from_count(k.max(1));
    let variance_from_mean = bucket_sizes
        .iter()
        .map(|&b| {
            let d = F::from_count(b) - mean;
            d * d
        })
        .fold(F::zero(), |acc, v| acc + v);
    let ecdf_mse = ecdf_pairs.filter(|p| !p.is_empty()).map(|pairs| {
        let sum = pairs
            .iter()
            .map(|&(pred, emp)| (pred - emp) * (pred - emp))
            .fold(F::zero(), |acc, v| acc + v);
        sum / F::from_count(pairs.len())
    });
    Ok(PartitionMetrics {
        variance_from_mean,
        max_bucket: bucket_sizes.iter().copied().max().unwrap_or(0),
        ecdf_mse,
    })
}

/// `floor(k * p)` clamped to `0..k`.
#[inline]
pub fn ecdf_to_bucket<F: Scalar>(p: F, k: usize) -> usize {
    (F::from_count(k) * p)
        .saturating_usize()
        .min(k.saturating_sub(1))
}
