//! Command-line front end: run configurations and verification suites.

pub mod config;
pub mod run;

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bfamily::suites::{self, Suite};

pub use config::{ConfigError, RunConfig};
pub use run::{execute, RunError, RunOutcome, Status, Summary};

pub const EXIT_PASS: i32 = 0;
/// A check failed, or an output could not be written.
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BREAKDOWN: i32 = 3;

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Breakdown => EXIT_BREAKDOWN,
    }
}

/// Failure of a whole command, mapped to an exit code by [`CliError::code`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("invalid config {path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            Self::ReadConfig { .. } | Self::Config { .. } => EXIT_USAGE,
            Self::Run(RunError::Init(_)) => EXIT_USAGE,
            Self::Run(_) | Self::Io { .. } => EXIT_FAIL,
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::ReadConfig { path: path.to_path_buf(), source })?;
    RunConfig::parse(&text).map_err(|source| CliError::Config { path: path.to_path_buf(), source })
}

/// `run <config>`: returns the exit code.
pub fn run_command(
    config: &Path,
    output_dir: Option<&Path>,
    quiet: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = load_config(config)?;
    let dir = output_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.clone());
    let outcome = execute(&cfg, &dir)?;
    let status = outcome.summary.status;
    if !quiet {
        let failures = outcome.summary.failures();
        let _ = writeln!(
            out,
            "status: {} ({} reports, output in {})",
            serde_json::to_value(status).expect("status serializes").as_str().unwrap_or("?"),
            outcome.reports,
            dir.display()
        );
        if !failures.is_empty() {
            let _ = writeln!(out, "failed checks: {}", failures.join(", "));
        }
    }
    Ok(exit_code(status))
}

/// `verify <suite>`: runs the suite, prints one verdict per criterion and
/// writes the same lines to `verify_<suite>.txt` in `output_dir`.
pub fn verify_command(
    suite: Suite,
    output_dir: &Path,
    quiet: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    let path = output_dir.join(format!("verify_{suite}.txt"));
    // Open before running so an unwritable destination fails fast.
    let mut file = File::create(&path).map_err(io_err(&path))?;
    let results = suites::run_suite(suite, |c| {
        if !quiet {
            let _ = writeln!(out, "{c}");
        }
    });
    let failed: Vec<u8> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    let verdict = if failed.is_empty() {
        format!("suite {suite}: all {} criteria passed", results.len())
    } else {
        format!("suite {suite}: failed criteria {failed:?}")
    };
    let mut body = String::new();
    for c in &results {
        body.push_str(&format!("{c}\n"));
    }
    body.push_str(&verdict);
    body.push('\n');
    file.write_all(body.as_bytes()).map_err(io_err(&path))?;
    let _ = writeln!(out, "{verdict}");
    Ok(if failed.is_empty() { EXIT_PASS } else { EXIT_FAIL })
}
