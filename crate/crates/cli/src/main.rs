use std::path::PathBuf;
use std::process::ExitCode;

use bfamily::suites::Suite;
use bfamily_cli::{run_command, verify_command};
use clap::{Parser, Subcommand};

/// Pseudo-spectral b-family simulator with invariant audits.
#[derive(Debug, Parser)]
#[command(name = "bfamily", version)]
struct Cli {
    /// Directory for outputs; overrides `output.dir` from a config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Only report through the exit status and files.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a configuration and write invariants.csv, frames/ and summary.json.
    Run { config: PathBuf },
    /// Run an acceptance suite: spectral, conservation, sign, characteristics,
    /// growth, continuation or all.
    Verify {
        #[arg(value_parser = |s: &str| s.parse::<Suite>())]
        suite: Suite,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();
    let result = match &cli.command {
        Command::Run { config } => run_command(config, cli.output_dir.as_deref(), cli.quiet, &mut stdout),
        Command::Verify { suite } => {
            let dir = cli.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            verify_command(*suite, &dir, cli.quiet, &mut stdout)
        }
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    };
    ExitCode::from(code as u8)
}
