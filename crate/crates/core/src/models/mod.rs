//! Partition and eCDF models: the FMCD-trained linear model, the implicit
//! decision tree, a two-layer RMI, and the metrics used to compare them.

mod fmcd;
mod linear;
mod metrics;
mod rmi;
mod tree;

pub use fmcd::{fmcd_train, FmcdFit, MIN_SAMPLE};
pub use linear::{linear_predict, LinearPartitionModel};
pub use metrics::{compute_metrics, ecdf_to_bucket, PartitionMetrics};
pub use rmi::{rmi_eval, rmi_train, RmiModel};
pub use tree::{tree_build, tree_predict, tree_predict_batch, DecisionTreeClassifier};

/// Keys classified per batch.
pub const BATCH: usize = 8;

/// A monotone mapping from keys to bucket indices in `0..buckets()`.
pub trait Classifier: Sync {
    fn buckets(&self) -> usize;

    fn classify(&self, key: u64) -> usize;

    #[inline]
    fn classify_batch(&self, keys: &[u64; BATCH], out: &mut [usize; BATCH]) {
        for (o, &k) in out.iter_mut().zip(keys) {
            *o = self.classify(k);
        }
    }
}
