//! Command-line driver: one subcommand per experiment, each reading a
//! config file and writing a CSV into the output directory. Exits 0 on
//! success, 2 on configuration or input errors, 3 on numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use christoffel::config::ExperimentConfig;
use christoffel::runner::{run_and_write, Experiment};

#[derive(Parser)]
#[command(
    name = "christoffel",
    about = "Kernel and Toeplitz experiments over discrete measures",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Off-diagonal kernel mass decay curves
    Localization(RunArgs),
    /// Partial-kernel smallness near a vanishing point
    Forbidden(RunArgs),
    /// Toeplitz algebra defects, Szego residuals, moment gaps
    Toeplitz(RunArgs),
    /// Randomized comparison-inequality trials for dominated measures
    Lubinsky(RunArgs),
    /// Off-space commutator mass and rank for a rational symbol
    Skop(RunArgs),
    /// Peak-section localization measures at an anchor point
    Nevai(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `out`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized trials (overrides the config's `seed`)
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (which, args) = match &cli.command {
        Command::Localization(a) => (Experiment::Localization, a),
        Command::Forbidden(a) => (Experiment::Forbidden, a),
        Command::Toeplitz(a) => (Experiment::Toeplitz, a),
        Command::Lubinsky(a) => (Experiment::Lubinsky, a),
        Command::Skop(a) => (Experiment::Skop, a),
        Command::Nevai(a) => (Experiment::Nevai, a),
    };
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    match run_and_write(which, &cfg) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
