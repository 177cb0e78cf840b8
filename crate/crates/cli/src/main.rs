//! `propeval`: evaluate ranked object proposals against ground truth,
//! probe the evaluation protocol's blind spots, and generate the synthetic
//! worlds those probes run on.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use propeval_cli::commands::{bias, convert, eval, finegrained, gameability, stats, synth};
use propeval_cli::error::CliError;
use propeval_cli::report::OutputFormats;

#[derive(Parser)]
#[command(
    name = "propeval",
    version,
    about = "Object-proposal evaluation toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel sections (0 = all cores). Results are
    /// identical for every value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output kinds to write, comma separated (default: json,csv,svg).
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the metric suite for proposal files against a dataset.
    Eval(eval::EvalArgs),
    /// Three-regime evaluation: annotated subset, complement, all.
    Gameability(gameability::GameabilityArgs),
    /// AUC as a function of the number of seen categories.
    BiasCapacity(bias::BiasArgs),
    /// Generate a synthetic partially annotated box world.
    Synth(synth::SynthArgs),
    /// Annotation statistics for a category split.
    Stats(stats::StatsArgs),
    /// Convert annotation/proposal files between formats.
    Convert(convert::ConvertArgs),
    /// Per-category recall by size, frequency, or supercategory.
    Finegrained(finegrained::FineGrainedArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let formats = OutputFormats::from_flags(&cli.format)?;
    match &cli.command {
        Command::Eval(args) => eval::run(args, &formats),
        Command::Gameability(args) => gameability::run(args, &formats),
        Command::BiasCapacity(args) => bias::run(args, &formats),
        Command::Synth(args) => synth::run(args),
        Command::Stats(args) => stats::run(args, &formats),
        Command::Convert(args) => convert::run(args),
        Command::Finegrained(args) => finegrained::run(args, &formats),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
