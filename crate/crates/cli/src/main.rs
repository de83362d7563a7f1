use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flillab::experiments::ExperimentId;
use flillab_cli::commands::{self, BallArg, MethodArg, PathSpec, ProcessKind, SmallBallSpec, SupArg};
use flillab_cli::{report_files, run_experiment, write_summary, CliError, Format, RunOptions};

#[derive(Parser)]
#[command(name = "flillab", version, about = "Functional LIL simulation laboratory")]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "FLILLAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write its knots as CSV.
    Simulate {
        #[command(flatten)]
        path: PathArgs,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sup-norm distance of a simulated path to a Strassen ball.
    Distance {
        #[command(flatten)]
        path: PathArgs,
        #[arg(long, value_enum, default_value = "s2")]
        ball: BallArg,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = flillab::geometry::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Estimate P(‖W/T − f‖ ≤ ε) for f(t) = slope·t.
    Smallball {
        #[arg(long, value_enum, default_value = "naive")]
        method: MethodArg,
        #[arg(long, default_value_t = 0.0)]
        slope: f64,
        #[arg(long = "t-scale", default_value_t = 1.0)]
        t_scale: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "grid-m", default_value_t = flillab::Grid::DEFAULT_M)]
        grid_m: usize,
        #[arg(long, value_enum, default_value = "continuous")]
        sup: SupArg,
    },
    /// Run an experiment from a TOML config.
    Experiment {
        /// flil, quantile, local, increments, chung, bahadur-kiefer, dkw or
        /// poissonization.
        id: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated seeds replacing those of the config.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Median and prefix-extremum summary of record files.
    Report {
        /// Record files (.csv or .jsonl).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PathArgs {
    #[arg(long, value_enum)]
    process: ProcessKind,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bandwidth of local and increment paths.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long = "grid-m", default_value_t = flillab::Grid::DEFAULT_M)]
    grid_m: usize,
    /// Divide empirical-type paths by √(2 loglog n).
    #[arg(long)]
    flil: bool,
}

impl From<PathArgs> for PathSpec {
    fn from(a: PathArgs) -> Self {
        PathSpec {
            process: a.process,
            n: a.n,
            seed: a.seed,
            a: a.a,
            t0: a.t0,
            grid_m: a.grid_m,
            flil: a.flil,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn execute(cli: Cli, threads: usize) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { path, out } => {
            let g = PathSpec::from(path).build()?;
            commands::write_trajectory(&g, writer(out.as_deref())?)
        }
        Command::Distance {
            path,
            ball,
            radius,
            tolerance,
        } => print_json(&commands::distance(&path.into(), ball, radius, tolerance)?),
        Command::Smallball {
            method,
            slope,
            t_scale,
            eps,
            reps,
            seed,
            grid_m,
            sup,
        } => print_json(&commands::small_ball(&SmallBallSpec {
            method,
            slope,
            t_scale,
            epsilon: eps,
            reps,
            seed,
            grid_m,
            sup,
        })?),
        Command::Experiment {
            id,
            config,
            out,
            seeds,
            format,
        } => {
            let experiment: ExperimentId = id.parse().map_err(|e: flillab::Error| CliError::Config(e.to_string()))?;
            let manifest = run_experiment(&RunOptions {
                experiment,
                config,
                out: out.clone(),
                seeds,
                format: match format {
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Jsonl => Format::Jsonl,
                },
                threads,
            })?;
            eprintln!(
                "{}: {:?} written to {}",
                manifest.experiment,
                manifest.record_counts,
                out.display()
            );
            Ok(())
        }
        Command::Report { inputs, out } => write_summary(&report_files(&inputs)?, writer(out.as_deref())?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        eprintln!("error: --threads must be positive");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    match execute(cli, threads) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
