//! `featsel`: rank features, run the selection benchmark, generate
//! synthetic data and re-render reports.

mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchmarkArgs, RankArgs, ReportArgs, SynthArgs};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "featsel", version, about = "Feature selection and random-forest AUC benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank features with one method and write its ranking CSV.
    Rank(RankArgs),
    /// Select, refit and score every method; writes report.csv and report.md.
    Benchmark(BenchmarkArgs),
    /// Generate a dataset with known relevant, redundant and noise columns.
    Synth(SynthArgs),
    /// Re-render a report.csv.
    Report(ReportArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rank(a) => {
            for p in commands::rank(&a)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Benchmark(a) => {
            let r = commands::benchmark(&a)?;
            for row in &r.rows {
                let auc = row
                    .validation_auc
                    .map_or("n/a".to_string(), |v| format!("{:.2}%", 100.0 * v));
                println!("{:<10} {:>3} features  validation AUC {auc}", row.method, row.selected().len());
            }
        }
        Command::Synth(a) => {
            for p in commands::synth(&a)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Report(a) => println!("wrote {}", commands::report(&a)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `featsel --help` for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
