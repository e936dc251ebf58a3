use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quantlint::driver::{run_check, CheckFlags};

#[derive(Parser)]
#[command(
    name = "quantlint",
    version,
    about = "Unit-of-measure and named-quantity checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, dimension-check, quantity-check, and lint source files.
    Check {
        /// Emit one JSON object per file instead of the human report.
        #[arg(long)]
        json: bool,
        /// Treat discipline lint warnings as errors.
        #[arg(long)]
        strict_discipline: bool,
        /// Load a unit-table overlay before checking.
        #[arg(long, value_name = "FILE")]
        units: Option<PathBuf>,
        /// Include the final variable environments in each report.
        #[arg(long)]
        dump_env: bool,
        /// Source files; each file is one program.
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            json,
            strict_discipline,
            units,
            dump_env,
            files,
        } => {
            let flags = CheckFlags {
                json,
                strict_discipline,
                units,
                dump_env,
            };
            let outcome = run_check(&files, &flags);
            print!("{}", outcome.output);
            ExitCode::from(outcome.exit_code as u8)
        }
    }
}
