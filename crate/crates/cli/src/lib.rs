//! The `dupaudit` command line.
//!
//! Exit codes: 0 on success, 1 for usage or input errors, 2 for internal
//! failures. Set `NO_COLOR` to disable colored help output.

mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;

use clap::{CommandFactory, FromArgMatches};

pub use args::Cli;
pub use config::{RunConfig, RUN_CONFIG_FILE};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or refused overwrite.
    Usage(String),
    /// Unreadable or invalid input data.
    Input(dupaudit::Error),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    pub(crate) fn internal(e: impl fmt::Display) -> CliError {
        CliError::Internal(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dupaudit::Error> for CliError {
    fn from(e: dupaudit::Error) -> Self {
        CliError::Input(e)
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Messages go to stderr; the list of written files to stdout.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = if std::env::var_os("NO_COLOR").is_some() {
        clap::ColorChoice::Never
    } else {
        clap::ColorChoice::Auto
    };
    let matches = match Cli::command().color(color).try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match execute(&cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<Vec<std::path::PathBuf>, CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = RunConfig::resolve(cli)?;
    commands::dispatch(cli, &config)
}
