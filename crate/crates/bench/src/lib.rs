//! Benchmark harness for the `ipls` sorter.
//!
//! Each run loads or generates its keys once, sorts one untimed warm-up
//! copy, then times `reps` fresh copies. Only the sort call is timed. Every
//! output is checked for order and against a multiset hash of the input
//! before its time is accepted, and the median rate is reported.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use ipls::datagen::{generate_keys, load_binary, DatasetSpec};
use ipls::partition::PartitionConfig;
use ipls::sorter::radix_sort_with;
use ipls::verify::{verify_sorted, MultisetHash};
use ipls::{sort_u64_with, ModelKind, SortConfig, SortStats};
use serde::{Deserialize, Serialize};

pub const DEFAULT_REPS: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Sort(#[from] ipls::Error),
    #[error("{algorithm} on {dataset} (n={n}) produced an unsorted or altered array")]
    Verification {
        algorithm: Algorithm,
        dataset: String,
        n: usize,
    },
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("invalid run: {0}")]
    InvalidRun(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Learned sort with the requested thread count.
    Ipls,
    IplsSeq,
    /// Learned sort with decision-tree models only.
    TreeSort,
    /// The byte radix base case applied to the whole input.
    RadixBase,
    /// `slice::sort_unstable`.
    StdBaseline,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ipls,
        Algorithm::IplsSeq,
        Algorithm::TreeSort,
        Algorithm::RadixBase,
        Algorithm::StdBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ipls => "ipls",
            Algorithm::IplsSeq => "ipls_seq",
            Algorithm::TreeSort => "tree_sort",
            Algorithm::RadixBase => "radix_base",
            Algorithm::StdBaseline => "std_baseline",
        }
    }

    fn uses_threads(self) -> bool {
        matches!(self, Algorithm::Ipls | Algorithm::TreeSort)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| BenchError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Synthetic(DatasetSpec),
    File(PathBuf),
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Synthetic(spec) => spec.dataset.name().to_string(),
            Source::File(p) => p.display().to_string(),
        }
    }

    /// Keys in sortable form; synthetic doubles are encoded here, outside
    /// any timed region.
    pub fn load(&self) -> Result<Vec<u64>> {
        Ok(match self {
            Source::Synthetic(spec) => generate_keys(spec)?,
            Source::File(p) => load_binary(p)?,
        })
    }

    fn seed(&self) -> u64 {
        match self {
            Source::Synthetic(spec) => spec.seed,
            Source::File(_) => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub algorithm: Algorithm,
    pub source: Source,
    pub reps: usize,
    pub threads: usize,
    /// Bucket count override.
    pub buckets: Option<usize>,
    pub block_keys: Option<usize>,
}

impl BenchRun {
    pub fn new(algorithm: Algorithm, source: Source) -> Self {
        Self {
            algorithm,
            source,
            reps: DEFAULT_REPS,
            threads: 1,
            buckets: None,
            block_keys: None,
        }
    }

    /// Thread count the algorithm actually uses.
    pub fn effective_threads(&self) -> usize {
        if self.algorithm.uses_threads() {
            self.threads
        } else {
            1
        }
    }

    pub fn sort_config(&self) -> SortConfig {
        let d = PartitionConfig::default();
        SortConfig {
            partition: PartitionConfig {
                buckets: self.buckets.unwrap_or(d.buckets),
                block_keys: self.block_keys.unwrap_or(d.block_keys),
                ..d
            },
            threads: self.effective_threads(),
            seed: self.source.seed(),
            model: if self.algorithm == Algorithm::TreeSort {
                ModelKind::DecisionTree
            } else {
                ModelKind::Fmcd
            },
            ..SortConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(BenchError::InvalidRun(
                "repetitions must be at least 1".into(),
            ));
        }
        self.sort_config()
            .validate()
            .map_err(|e| BenchError::InvalidRun(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub algorithm: Algorithm,
    pub dataset: String,
    pub n: usize,
    pub threads: usize,
    pub seed: u64,
    pub reps: usize,
    pub wall_seconds: Vec<f64>,
    pub median_keys_per_sec: f64,
    pub verified: bool,
    /// Deepest recursion level seen; 0 for the non-recursive algorithms.
    pub depth_observed: usize,
    pub peak_aux_bytes: usize,
}

/// Sorts `keys` with the run's algorithm.
pub fn sort_keys(
    run: &BenchRun,
    cfg: &SortConfig,
    keys: &mut [u64],
    scratch: &mut Vec<u64>,
) -> SortStats {
    match run.algorithm {
        Algorithm::Ipls | Algorithm::IplsSeq | Algorithm::TreeSort => sort_u64_with(keys, cfg),
        Algorithm::RadixBase => {
            radix_sort_with(keys, scratch, cfg.insertion_threshold);
            SortStats::default()
        }
        Algorithm::StdBaseline => {
            keys.sort_unstable();
            SortStats::default()
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

pub fn run_bench(run: &BenchRun) -> Result<BenchResult> {
    run.validate()?;
    let input = run.source.load()?;
    run_bench_on(run, &input)
}

/// Like [`run_bench`] on keys that are already loaded.
pub fn run_bench_on(run: &BenchRun, input: &[u64]) -> Result<BenchResult> {
    run.validate()?;
    let cfg = run.sort_config();
    let hash = MultisetHash::of(input);
    let n = input.len();
    let mut scratch = Vec::new();
    let mut stats = SortStats::default();
    let mut wall = Vec::with_capacity(run.reps);
    for rep in 0..=run.reps {
        let mut keys = input.to_vec();
        let t = Instant::now();
        let s = sort_keys(run, &cfg, &mut keys, &mut scratch);
        let dt = t.elapsed().as_secs_f64();
        if !verify_sorted(&hash, &keys) {
            return Err(BenchError::Verification {
                algorithm: run.algorithm,
                dataset: run.source.label(),
                n,
            });
        }
        if rep > 0 {
            wall.push(dt);
        }
        stats = s;
    }
    let m = median(&wall);
    Ok(BenchResult {
        algorithm: run.algorithm,
        dataset: run.source.label(),
        n,
        threads: cfg.threads,
        seed: run.source.seed(),
        reps: run.reps,
        median_keys_per_sec: if m > 0.0 { n as f64 / m } else { 0.0 },
        wall_seconds: wall,
        verified: true,
        depth_observed: stats.max_depth,
        peak_aux_bytes: stats.peak_aux_bytes,
    })
}

/// Runs every algorithm at every size on `template`'s dataset and seed.
/// A verification failure is recorded as an unverified row and ends the
/// sweep.
pub fn run_sweep(
    algorithms: &[Algorithm],
    template: &DatasetSpec,
    sizes: &[usize],
    threads: usize,
    reps: usize,
) -> Result<Vec<BenchResult>> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(BenchError::InvalidRun(
            "sweep sizes must be ascending".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let spec = DatasetSpec { n, ..*template };
        let input = generate_keys(&spec)?;
        for &algorithm in algorithms {
            let run = BenchRun {
                reps,
                threads,
                ..BenchRun::new(algorithm, Source::Synthetic(spec))
            };
            match run_bench_on(&run, &input) {
                Ok(r) => rows.push(r),
                Err(BenchError::Verification { .. }) => {
                    rows.push(BenchResult {
                        algorithm,
                        dataset: run.source.label(),
                        n,
                        threads: run.effective_threads(),
                        seed: spec.seed,
                        reps,
                        wall_seconds: Vec::new(),
                        median_keys_per_sec: 0.0,
                        verified: false,
                        depth_observed: 0,
                        peak_aux_bytes: 0,
                    });
                    return Ok(rows);
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}

/// One CSV line. `raw_wall_seconds` holds the repetition times joined by
/// `;` and is only written when requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub algorithm: String,
    pub dataset: String,
    pub n: usize,
    pub threads: usize,
    pub seed: u64,
    pub reps: usize,
    pub median_keys_per_sec: f64,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_wall_seconds: Option<String>,
}

impl CsvRow {
    pub fn from_result(r: &BenchResult, raw: bool) -> Self {
        Self {
            algorithm: r.algorithm.to_string(),
            dataset: r.dataset.clone(),
            n: r.n,
            threads: r.threads,
            seed: r.seed,
            reps: r.reps,
            median_keys_per_sec: r.median_keys_per_sec,
            verified: r.verified,
            raw_wall_seconds: raw.then(|| {
                r.wall_seconds
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(";")
            }),
        }
    }
}

pub fn write_csv<W: Write>(out: W, results: &[BenchResult], raw: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if results.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in results {
        w.serialize(CsvRow::from_result(r, raw))?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_COLUMNS: [&str; 8] = [
    "algorithm",
    "dataset",
    "n",
    "threads",
    "seed",
    "reps",
    "median_keys_per_sec",
    "verified",
];

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ipls::datagen::Dataset;

    fn uniform(n: usize) -> Source {
        Source::Synthetic(DatasetSpec::new(Dataset::Uniform, n, 1))
    }

    #[test]
    fn names_parse() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("quick".parse::<Algorithm>().is_err());
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn every_algorithm_verifies() {
        for a in Algorithm::ALL {
            let run = BenchRun {
                reps: 2,
                threads: 2,
                ..BenchRun::new(a, uniform(20_000))
            };
            let r = run_bench(&run).unwrap();
            assert!(r.verified && r.median_keys_per_sec > 0.0);
            assert_eq!(r.wall_seconds.len(), 2);
            assert_eq!(r.threads, if a.uses_threads() { 2 } else { 1 });
        }
    }

    #[test]
    fn zero_reps_rejected() {
        let run = BenchRun {
            reps: 0,
            ..BenchRun::new(Algorithm::IplsSeq, uniform(10))
        };
        assert!(matches!(run_bench(&run), Err(BenchError::InvalidRun(_))));
    }

    #[test]
    fn sweep_rows_and_csv_round_trip() {
        let spec = DatasetSpec::new(
            Dataset::Normal {
                mean: 0.0,
                std_dev: 1.0,
            },
            1,
            3,
        );
        let algos = [Algorithm::IplsSeq, Algorithm::StdBaseline];
        let rows = run_sweep(&algos, &spec, &[1000, 5000, 20_000], 1, 1).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.verified));
        for raw in [false, true] {
            let mut buf = Vec::new();
            write_csv(&mut buf, &rows, raw).unwrap();
            let text = String::from_utf8(buf.clone()).unwrap();
            let header = text.lines().next().unwrap();
            let mut expected = CSV_COLUMNS.join(",");
            if raw {
                expected.push_str(",raw_wall_seconds");
            }
            assert_eq!(header, expected);
            let back = read_csv(&buf[..]).unwrap();
            let again: Vec<CsvRow> = rows.iter().map(|r| CsvRow::from_result(r, raw)).collect();
            assert_eq!(back, again);
        }
        assert!(run_sweep(&algos, &spec, &[10, 5], 1, 1).is_err());
    }
}
