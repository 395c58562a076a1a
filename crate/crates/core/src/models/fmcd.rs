//! Fastest Minimum Conflict Degree training.
//!
//! The trainer searches for the smallest conflict degree `D` such that every
//! window of `D + 1` consecutive sample keys spans at least one bucket width
//! `u_D = (s[S-1-D] - s[D]) / (k - 2)`. The resulting model maps `s[D]` to
//! bucket 1 and `s[S-1-D]` to bucket `k - 1`.
//!
//! Spans and window comparisons are done in 128-bit integer arithmetic
//! (`gap * (k - 2) >= span`), so they are exact over the full key range.

use super::LinearPartitionModel;
use crate::{Error, Result, Scalar};

pub const MIN_SAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmcdFit<F> {
    pub model: LinearPartitionModel<F>,
    /// Final conflict degree. Diagnostic only.
    pub conflict_degree: usize,
}

pub fn fmcd_train<F: Scalar>(sorted_sample: &[u64], buckets: usize) -> Result<FmcdFit<F>> {
    let s = sorted_sample;
    let n = s.len();
    if n < MIN_SAMPLE {
        return Err(Error::SampleTooSmall {
            needed: MIN_SAMPLE,
            got: n,
        });
    }
    if buckets < 3 {
        return Err(Error::InvalidModel(format!(
            "{buckets} buckets, need at least 3"
        )));
    }
    let width_scale = (buckets - 2) as i128;
    // Signed: once D passes n / 2 the two anchors cross.
    let span = |d: usize| s[n - 1 - d] as i128 - s[d] as i128;

    let mut i = 0usize;
    let mut d = 1usize;
    let mut u = span(d);
    while i + d < n {
        while i + d < n && (s[i + d] - s[i]) as i128 * width_scale >= u {
            i += 1;
        }
        if i + d >= n {
            break;
        }
        // Either end bucket holds up to D + 1 sample keys.
        if (d + 2) * 3 > n {
            break;
        }
        d += 1;
        u = span(d);
    }

    if u <= 0 {
        return Err(Error::DegenerateSample);
    }
    let width = F::from_key(u as u64) / F::from_count(buckets - 2);
    let slope = F::one() / width;
    let lo = s[d];
    let anchor_span = F::key_offset(s[n - 1 - d], lo);
    let two = F::one() + F::one();
    // (k - a * (hi + lo)) / 2, shifted to the origin `lo`.
    let intercept = (F::from_count(buckets) - slope * anchor_span) / two;
    let model = LinearPartitionModel::anchored(slope, intercept, lo, buckets)
        .map_err(|_| Error::DegenerateSample)?;
    Ok(FmcdFit {
        model,
        conflict_degree: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Classifier;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Line-by-line transliteration of the reference loop in plain `f64`,
    /// valid for keys below 2^53. Returns (a, b, D).
    fn reference(s: &[u64], k: usize) -> (f64, f64, usize) {
        let n = s.len();
        let mut i = 0usize;
        let mut d = 1usize;
        let mut u_d = (s[n - 1 - d] as f64 - s[d] as f64) / (k - 2) as f64;
        while i <= n - 1 - d {
            while i + d < n && (s[i + d] - s[i]) as f64 >= u_d {
                i += 1;
            }
            if i + d >= n {
                break;
            }
            d += 1;
            if d * 3 > n {
                break;
            }
            u_d = (s[n - 1 - d] as f64 - s[d] as f64) / (k - 2) as f64;
        }
        let a = 1.0 / u_d;
        let b = (k as f64 - a * (s[n - 1 - d] as f64 + s[d] as f64)) / 2.0;
        (a, b, d)
    }

    fn loads(model: &impl Classifier, keys: &[u64]) -> Vec<usize> {
        let mut l = vec![0; model.buckets()];
        for &k in keys {
            l[model.classify(k)] += 1;
        }
        l
    }

    #[test]
    fn dense_range_example() {
        let sample: Vec<u64> = (0..100).collect();
        let fit: FmcdFit<f64> = fmcd_train(&sample, 10).unwrap();
        // Frozen from an exact rational run of the reference loop:
        // D = 10, a = 8/79, b = -1/79.
        assert_eq!(fit.conflict_degree, 10);
        assert!((fit.model.slope() - 8.0 / 79.0).abs() < 1e-15);
        assert!((fit.model.intercept() + 1.0 / 79.0).abs() < 1e-13);
        let l = loads(&fit.model, &sample);
        assert_eq!(l, vec![10, 10, 10, 10, 10, 10, 10, 10, 9, 11]);
        assert!(*l.iter().max().unwrap() <= 34);
    }

    #[test]
    fn end_buckets_stay_within_a_third() {
        use crate::datagen::{generate_keys, Dataset, DatasetSpec};
        // Encoded normal keys form two far apart clusters, so no window ever
        // closes and the degree stops at its cap.
        let spec = DatasetSpec::new(
            Dataset::Normal {
                mean: 0.0,
                std_dev: 1.0,
            },
            216,
            0,
        );
        let mut s = generate_keys(&spec).unwrap();
        s.sort_unstable();
        let fit: FmcdFit<f64> = fmcd_train(&s, 64).unwrap();
        assert_eq!(fit.conflict_degree, 71);
        assert!(*loads(&fit.model, &s).iter().max().unwrap() <= 72);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        for k in [3, 4, 256] {
            let r: Result<FmcdFit<f64>> = fmcd_train(&[5; 6], k);
            assert!(matches!(r, Err(Error::DegenerateSample)));
        }
    }

    #[test]
    fn mostly_constant_sample_is_degenerate() {
        let mut s = vec![7u64; 100];
        s[0] = 1;
        s[99] = 9;
        let r: Result<FmcdFit<f64>> = fmcd_train(&s, 16);
        assert!(matches!(r, Err(Error::DegenerateSample)));
    }

    #[test]
    fn small_inputs_are_rejected() {
        assert!(matches!(
            fmcd_train::<f64>(&[1, 2, 3], 8),
            Err(Error::SampleTooSmall { .. })
        ));
        assert!(fmcd_train::<f64>(&[1, 2, 3, 4], 2).is_err());
    }

    #[test]
    fn matches_reference_transliteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for trial in 0..500 {
            let n: usize = rng.gen_range(4..600);
            let k = [3, 4, 10, 64, 256][trial % 5];
            let max = [1u64 << 20, 1 << 40, 1 << 52][trial % 3];
            let mut s: Vec<u64> = (0..n).map(|_| rng.gen_range(0..max)).collect();
            s.sort_unstable();
            let (a, b, d) = reference(&s, k);
            let cap = (n / 3usize).saturating_sub(1).max(1);
            match fmcd_train::<f64>(&s, k) {
                Ok(fit) if d > cap => assert_eq!(fit.conflict_degree, cap),
                Ok(fit) => {
                    assert_eq!(fit.conflict_degree, d);
                    assert!((fit.model.slope() - a).abs() <= 1e-12 * a.abs());
                    let bb = fit.model.intercept();
                    assert!((bb - b).abs() <= 1e-9 * b.abs().max(1.0), "{bb} vs {b}");
                }
                Err(Error::DegenerateSample) => assert!(!(a > 0.0 && a.is_finite())),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn conflict_degree_is_bounded_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n: usize = rng.gen_range(4..2000);
            let mut s: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
            s.sort_unstable();
            let a: FmcdFit<f64> = fmcd_train(&s, 256).unwrap();
            let b: FmcdFit<f64> = fmcd_train(&s, 256).unwrap();
            assert_eq!(a, b);
            assert!(a.conflict_degree <= (n / 3usize).saturating_sub(1).max(1));
        }
    }

    #[test]
    fn max_load_bound_on_random_distinct_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..300 {
            let n = rng.gen_range(64..=4096);
            let k = if rng.gen() { 64 } else { 256 };
            let mut s: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
            s.sort_unstable();
            s.dedup();
            let fit: FmcdFit<f64> = fmcd_train(&s, k).unwrap();
            let max = *loads(&fit.model, &s).iter().max().unwrap();
            assert!(max <= s.len().div_ceil(3));
        }
    }

    #[test]
    fn full_range_keys_keep_their_order() {
        let s = [
            0,
            1,
            2,
            3,
            u64::MAX - 3,
            u64::MAX - 2,
            u64::MAX - 1,
            u64::MAX,
        ];
        let fit: FmcdFit<f64> = fmcd_train(&s, 8).unwrap();
        assert!(fit.model.predict(0) <= fit.model.predict(u64::MAX / 2));
        assert!(fit.model.predict(u64::MAX / 2) <= fit.model.predict(u64::MAX));
        assert!(fit.model.predict(0) < fit.model.predict(u64::MAX));
    }

    #[test]
    fn trains_in_single_precision() {
        let sample: Vec<u64> = (0..1000).map(|i| i * 37).collect();
        let fit: FmcdFit<f32> = fmcd_train(&sample, 64).unwrap();
        let max = *loads(&fit.model, &sample).iter().max().unwrap();
        assert!(max <= 334);
    }
}
