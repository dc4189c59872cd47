use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;

/// Residual-overfit contextual bandit experiments.
#[derive(Debug, Parser)]
#[command(name = "rome", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured policy and replication, write results, print the summary.
    Run(RunArgs),
    /// Write the one-dimensional toy curves and uncertainty bands as CSV.
    Toy(ToyArgs),
    /// Monte-Carlo check of E[(f-g)^2] = MSE[f] + Var[g].
    VerifyProposition(VerifyArgs),
    /// Merge the summary.csv files under a directory and mark the best policy per dataset.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Config setting that wins over the file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides experiment.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides experiment.seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ToyArgs {
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluation points on [-1.5, 1.5].
    #[arg(long, default_value_t = 61)]
    grid_points: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10_000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replace the tuned model by this constant.
    #[arg(long, value_name = "C")]
    frozen_f: Option<f64>,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    /// Rows per simulated dataset.
    #[arg(long, default_value_t = 200)]
    rows: usize,
    /// Noise standard deviation of the simulated data.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    /// Ridge penalty of the tuned model.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory searched for summary.csv files; report.csv is written here.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Toy(a) => commands::toy(a),
        Command::VerifyProposition(a) => commands::verify_proposition(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
