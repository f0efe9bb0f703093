//! Command-line front end for cause-effect inference on bivariate data.
//!
//! Subcommands: `infer` decides the causal direction of a two-column pair
//! file, `benchmark` measures decision accuracy on synthetic draws,
//! `verify` runs the oracle and bound suites, `generate` emits synthetic
//! pair files for fixtures. All reports are key-sorted JSON and, for a
//! fixed seed, byte-identical across runs and thread counts.
//!
//! Exit codes: 0 success, 1 unreadable or ill-formed input (and verification
//! failures), 2 degenerate data, 64 usage errors.

mod benchmark;
mod generate;
mod infer;
mod pairfile;
mod report;
mod verify;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(name = "igci-cli", version, about = "Information-geometric cause-effect inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer the causal direction of a two-column pair file.
    Infer(infer::InferArgs),
    /// Measure decision accuracy on synthetic cause-effect draws.
    Benchmark(benchmark::BenchmarkArgs),
    /// Run the oracle-equivalence, tail-bound, and conservation suites.
    Verify(verify::VerifyArgs),
    /// Generate a synthetic pair file.
    Generate(generate::GenerateArgs),
}

fn main() {
    // IGCI_THREADS overrides the worker count; results do not depend on it.
    if let Ok(value) = std::env::var("IGCI_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                    .ok();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            e.print().ok();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Infer(args) => infer::run(&args),
        Command::Benchmark(args) => benchmark::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Generate(args) => generate::run(&args),
    };
    std::process::exit(code);
}
