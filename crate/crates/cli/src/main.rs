//! `rod`: generate the Burgers benchmark, fit twin data models, sweep ranks,
//! evaluate and compare against empirical modes.
//!
//! Exit status: 0 success, 1 usage error, 2 computation failure, 3 when
//! `compare` finds that the ROD modes do not dominate.

mod commands;
mod settings;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rod_core::metrics::CorrelationVariant;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "rod", version, about = "Randomized orthogonal decomposition twin data models")]
struct Cli {
    /// Plain-text `key = value` file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the exact Burgers snapshot matrix as CSV plus a `.meta` sidecar.
    Generate(GenerateArgs),
    /// Fit a twin model at one rank and print its quality report.
    Fit(FitArgs),
    /// Fit every rank up to --max-rank and write the Pareto table.
    Sweep(SweepArgs),
    /// Reconstruct from a saved model and write plot data.
    Evaluate(EvaluateArgs),
    /// Compare ROD and empirical mode projection norms.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    quad_order: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
}

#[derive(Args, Clone)]
struct FitFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// Extra randomized samples beyond the rank.
    #[arg(long)]
    oversampling: Option<usize>,
    /// Replace the modes by an orthonormal basis of their span.
    #[arg(long)]
    reorthonormalize: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model file to write.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    rank: Option<usize>,
    #[command(flatten)]
    fit: FitFlags,
    #[arg(long, value_parser = parse_variant)]
    correlation_variant: Option<CorrelationVariant>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Pareto CSV to write.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    max_rank: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    fit: FitFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Directory receiving reconstruction.csv, modes.csv, amplitudes.csv and report.txt.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant)]
    correlation_variant: Option<CorrelationVariant>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Compare the empirical modes with themselves (no model needed).
    #[arg(long)]
    fourier_self: bool,
    /// Also report the empirical norm restricted to the model's rank.
    #[arg(long)]
    same_rank: bool,
}

fn parse_variant(s: &str) -> Result<CorrelationVariant, String> {
    s.parse().map_err(|e: rod_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(u) = e.downcast_ref::<UsageError>() {
                eprintln!("error: {u}");
                ExitCode::from(1)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        }
    }
}
