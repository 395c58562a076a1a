use crate::{Classifier, Error, Result, Scalar};

/// `bucket(x) = clamp(floor(a * x + b), 0, k - 1)`.
///
/// The model is stored relative to an integer `origin`, so the product is
/// taken over `x - origin`. With `origin = 0` this is the plain form; FMCD
/// anchors at the low end of the sample, which keeps the arithmetic exact
/// for narrow key ranges far from zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPartitionModel<F> {
    slope: F,
    intercept: F,
    origin: u64,
    buckets: usize,
    last: F,
}

impl<F: Scalar> LinearPartitionModel<F> {
    pub fn new(slope: F, intercept: F, buckets: usize) -> Result<Self> {
        Self::anchored(slope, intercept, 0, buckets)
    }

    /// Model evaluated as `slope * (x - origin) + intercept`.
    pub fn anchored(slope: F, intercept: F, origin: u64, buckets: usize) -> Result<Self> {
        if !slope.is_finite() || slope <= F::zero() {
            return Err(Error::InvalidModel(format!(
                "slope {slope} must be finite and > 0"
            )));
        }
        if !intercept.is_finite() {
            return Err(Error::InvalidModel(format!(
                "intercept {intercept} must be finite"
            )));
        }
        if buckets < 3 {
            return Err(Error::InvalidModel(format!(
                "{buckets} buckets, need at least 3"
            )));
        }
        Ok(Self {
            slope,
            intercept,
            origin,
            buckets,
            last: F::from_count(buckets - 1),
        })
    }

    pub fn slope(&self) -> F {
        self.slope
    }

    /// Intercept of the unanchored form `a * x + b`.
    pub fn intercept(&self) -> F {
        self.intercept - self.slope * F::from_key(self.origin)
    }

    pub fn anchored_intercept(&self) -> F {
        self.intercept
    }

    pub fn origin(&self) -> u64 {
        self.origin
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    #[inline(always)]
    pub fn score(&self, key: u64) -> F {
        self.slope * F::key_offset(key, self.origin) + self.intercept
    }

    /// `floor(a * x + b)` before clamping.
    #[inline]
    pub fn raw_bucket(&self, key: u64) -> i64 {
        self.score(key).floor_i64()
    }

    #[inline(always)]
    pub fn predict(&self, key: u64) -> usize {
        self.score(key).clamp_index(self.last)
    }
}

impl<F: Scalar> Classifier for LinearPartitionModel<F> {
    fn buckets(&self) -> usize {
        self.buckets
    }

    #[inline(always)]
    fn classify(&self, key: u64) -> usize {
        self.predict(key)
    }
}

pub fn linear_predict<F: Scalar>(model: &LinearPartitionModel<F>, key: u64) -> usize {
    model.predict(key)
}
