use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ipls::datagen::{generate_keys, load_binary, save_binary, Dataset, DatasetSpec};
use ipls::verify::is_sorted;
use ipls_bench::{
    run_bench, run_sweep, write_csv, Algorithm, BenchError, BenchRun, Source, DEFAULT_REPS,
};

#[derive(Parser)]
#[command(
    name = "ipls-bench",
    version,
    about = "Benchmark and data tools for the ipls sorter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time one algorithm on one dataset and print a CSV row.
    Bench(BenchArgs),
    /// Time algorithms over a list of input sizes.
    Sweep(SweepArgs),
    /// Write a synthetic dataset to a binary key file.
    Gen(GenArgs),
    /// Check that a binary key file is sorted.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "uniform")]
    dataset: Dataset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "BENCH_THREADS", default_value_t = default_threads())]
    threads: usize,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: usize,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    block_keys: Option<usize>,
    /// Bucket count.
    #[arg(long)]
    k: Option<usize>,
    /// Add a column with every repetition's wall time.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "ipls")]
    algo: Algorithm,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    /// Sort keys from this binary file instead of a synthetic dataset.
    #[arg(long)]
    file: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma separated algorithm names.
    #[arg(long, value_delimiter = ',', default_value = "ipls_seq")]
    algo: Vec<Algorithm>,
    /// Comma separated ascending sizes.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "10000,100000,1000000,10000000"
    )]
    sizes: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    dataset: Dataset,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(required_unless_present = "file")]
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    file: Option<PathBuf>,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn bench(args: BenchArgs) -> Result<ExitCode, BenchError> {
    let c = &args.common;
    let source = match args.file {
        Some(p) => Source::File(p),
        None => Source::Synthetic(DatasetSpec::new(c.dataset, args.n, c.seed)),
    };
    let run = BenchRun {
        reps: c.reps,
        threads: c.threads,
        buckets: c.k,
        block_keys: c.block_keys,
        ..BenchRun::new(args.algo, source)
    };
    let result = run_bench(&run)?;
    write_csv(output(&c.out)?, &[result], c.raw)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, BenchError> {
    let c = &args.common;
    if c.k.is_some() || c.block_keys.is_some() {
        return Err(BenchError::InvalidRun(
            "--k and --block-keys apply to bench only".into(),
        ));
    }
    let template = DatasetSpec::new(c.dataset, 1, c.seed);
    let rows = run_sweep(&args.algo, &template, &args.sizes, c.threads, c.reps)?;
    write_csv(output(&c.out)?, &rows, c.raw)?;
    Ok(if rows.iter().all(|r| r.verified) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn gen(args: GenArgs) -> Result<ExitCode, BenchError> {
    let keys = generate_keys(&DatasetSpec::new(args.dataset, args.n, args.seed))?;
    save_binary(&keys, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode, BenchError> {
    let path = args.path.or(args.file).expect("clap requires a path");
    let keys = load_binary(&path)?;
    if is_sorted(&keys) {
        println!("{}: {} keys, sorted", path.display(), keys.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let at = keys.windows(2).position(|w| w[0] > w[1]).unwrap_or(0);
        println!("{}: not sorted at index {}", path.display(), at + 1);
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Sweep(a) => sweep(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e @ BenchError::Verification { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
