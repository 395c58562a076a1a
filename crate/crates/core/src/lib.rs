//! In-place parallel learned sorting for 64-bit keys.
//!
//! The sorter partitions an array into `k` buckets with a linear model trained
//! on a random sample (FMCD, minimum conflict degree), moves keys into
//! contiguous bucket regions with a block-buffered in-place scheme, and recurses
//! on each bucket until a byte-radix base case takes over. Buckets whose keys
//! are all equal are left alone.
//!
//! ```
//! let mut keys = vec![18u64, 39, 33, 28, 25, 34, 11, 27, 47, 2];
//! ipls::sort_u64(&mut keys);
//! assert_eq!(keys, vec![2, 11, 18, 25, 27, 28, 33, 34, 39, 47]);
//! ```
//!
//! Model arithmetic is generic over the floating point scalar (see
//! [`Scalar`]); the sorter itself uses `f64` models, exposed through the
//! aliases below.

pub mod datagen;
mod error;
pub mod keys;
pub mod models;
pub mod partition;
mod scalar;
pub mod sorter;
pub mod verify;

pub use error::{Error, Result};
pub use keys::{decode_float, encode_float, FloatKey, SortableKey};
pub use models::{
    compute_metrics, ecdf_to_bucket, fmcd_train, rmi_train, tree_build, Classifier,
    DecisionTreeClassifier, FmcdFit, LinearPartitionModel, PartitionMetrics, RmiModel,
};
pub use partition::{BucketLayout, Oversampling, PartitionConfig};
pub use scalar::Scalar;
pub use sorter::{
    sort_f64, sort_f64_with, sort_u64, sort_u64_with, ModelKind, SortConfig, SortStats,
};

/// Linear partition model with `f64` parameters, as used by the sorter.
pub type LinearModel = LinearPartitionModel<f64>;
/// Single precision linear partition model.
pub type LinearModelF32 = LinearPartitionModel<f32>;
/// FMCD training result with `f64` parameters.
pub type Fmcd = FmcdFit<f64>;
/// Two-layer eCDF model with `f64` parameters.
pub type Rmi = RmiModel<f64>;
/// Single precision two-layer eCDF model.
pub type RmiF32 = RmiModel<f32>;
/// Partition quality metrics in `f64`.
pub type Metrics = PartitionMetrics<f64>;
