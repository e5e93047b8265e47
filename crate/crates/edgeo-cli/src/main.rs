//! `edgeo` — anchored distance-geometry recovery from the command line.
//!
//! Exit codes: 0 success, 1 solver non-convergence, 2 I/O or validation
//! error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EvaluateArgs, SampleArgs, SolveArgs};
use config::Config;

#[derive(Parser)]
#[command(
    name = "edgeo",
    version,
    about = "Recover point configurations from partial anchor distances"
)]
struct Cli {
    /// JSON config file; CLI flags override config keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides config `out`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// RNG seed (overrides config `seed`)
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario: points CSV, metadata, full distance CSV
    Generate,
    /// Draw a sample set and observe a distance file (anchor rows only)
    Sample {
        /// Bernoulli inclusion probability (overrides config `rate`)
        #[arg(long)]
        rate: Option<f64>,
        /// Fixed per-column sample count (overrides `rate`)
        #[arg(long)]
        per_column: Option<usize>,
        /// Distance CSV (default: <out>/dist.csv)
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Metadata JSON (default: <out>/points.meta.json)
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Recover the configuration from an observation file
    Solve {
        /// Solver: nuclear_norm | anchored_ls (overrides config `method`)
        #[arg(long)]
        method: Option<String>,
        /// Observations JSON (default: <out>/observations.json)
        #[arg(long)]
        obs: Option<PathBuf>,
    },
    /// Compare an estimate CSV against a reference CSV up to rigid motion
    Evaluate {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// Optional report JSON whose underdetermined columns are copied
        /// into the metrics
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the large-scale anchored benchmark (n=3000, m=50, r=2 at scale 1)
    BenchPaper {
        /// Problem size multiplier
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

fn run(cli: Cli) -> Result<i32, String> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }

    match cli.command {
        Command::Generate => commands::generate(&cfg),
        Command::Sample {
            rate,
            per_column,
            dist,
            meta,
        } => {
            if let Some(rate) = rate {
                cfg.rate = rate;
            }
            commands::sample(
                &cfg,
                &SampleArgs {
                    dist,
                    meta,
                    per_column,
                },
            )
        }
        Command::Solve { method, obs } => {
            if let Some(method) = method {
                cfg.method = method.parse().map_err(|e| format!("{e}"))?;
            }
            commands::solve(&cfg, &SolveArgs { obs })
        }
        Command::Evaluate {
            estimate,
            reference,
            report,
        } => commands::evaluate(
            &cfg,
            &EvaluateArgs {
                estimate,
                reference,
                report,
            },
        ),
        Command::BenchPaper { scale } => commands::bench_paper(&cfg, scale),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version, 2 for usage errors
            e.exit();
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
