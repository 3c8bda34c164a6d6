use std::path::PathBuf;
use std::process::ExitCode;

use allencahn_core::params::Backend;
use allencahn_core::{Error, Precision};
use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "allencahn",
    version,
    about = "Explicit Allen-Cahn solver and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation (two --backend flags run both and report Err).
    Run(RunArgs),
    /// Time every backend on a set of presets.
    Bench(BenchArgs),
    /// Cross-backend error for all presets of one dimension.
    Table3(Table3Args),
    /// List the experiment presets.
    Presets,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Worker threads for the stencil kernel (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Coarsen the grid by this factor; steps shrink by its square.
    #[arg(long)]
    scale: Option<usize>,
    #[arg(long)]
    precision: Option<Precision>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    preset: Option<String>,
    /// TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "backend", num_args = 1)]
    backends: Vec<Backend>,
    /// Output directory for diagnostics, snapshots and the final field.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write a snapshot every this many steps.
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    diagnostics_stride: Option<usize>,
    /// Write the final field dump as text instead of binary.
    #[arg(long)]
    text_dump: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Presets to time (default: every preset of --dim).
    #[arg(long = "preset")]
    presets: Vec<String>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Repetitions per backend; the minimum time is reported.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long = "backend", num_args = 1)]
    backends: Vec<Backend>,
    /// Write the table as CSV here as well.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Table3Args {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Reference/stencil precisions, e.g. f64/f32.
    #[arg(long, default_value = "f64/f64")]
    precision_pair: String,
    /// Accumulate the error every this many steps.
    #[arg(long, default_value_t = 1)]
    err_stride: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    scale: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Divergence { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, Error> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .map(|pool| pool.install(f)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => {
            let threads = args.common.threads;
            with_threads(threads, || commands::run(args)).and_then(|r| r)
        }
        Command::Bench(args) => {
            let threads = args.common.threads;
            with_threads(threads, || commands::bench(args)).and_then(|r| r)
        }
        Command::Table3(args) => {
            let threads = args.threads;
            with_threads(threads, || commands::table3(args)).and_then(|r| r)
        }
        Command::Presets => {
            commands::list_presets();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
