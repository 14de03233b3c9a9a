//! Command-line driver: `ml`, `solve`, `steer`, `sweep`, `optimize` and
//! `check`. Outputs are written atomically and every run leaves one JSON
//! manifest. Exit codes: 0 success, 2 usage, configuration or IO errors,
//! 3 numerical non-convergence.

mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use fracsteer_core::Error;

pub use args::{Cli, Command};
pub use output::{write_atomic, RunManifest, Status};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "FRACSTEER_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::NonConvergence { .. } | Error::Evaluation { .. } | Error::Numerical(_)) => {
                EXIT_NON_CONVERGENCE
            }
            _ => EXIT_CONFIG,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        },
    }
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Ml(_) => "ml",
        Command::Solve(_) => "solve",
        Command::Steer(_) => "steer",
        Command::Sweep(_) => "sweep",
        Command::Optimize(_) => "optimize",
        Command::Check(_) => "check",
    }
}

fn primary_out(cmd: &Command) -> Option<PathBuf> {
    match cmd {
        Command::Ml(a) => a.out.clone(),
        Command::Solve(a) => a.out.clone(),
        Command::Steer(a) => a.out.clone(),
        Command::Sweep(a) => a.out.clone(),
        Command::Optimize(a) => a.out.clone(),
        Command::Check(a) => a.out.clone(),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let name = subcommand_name(&cli.command);
    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let pool = match threads
        .map_or_else(rayon::ThreadPoolBuilder::new, |n| rayon::ThreadPoolBuilder::new().num_threads(n))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut manifest = RunManifest::new(name, cli.common.seed, pool.current_num_threads());
    let result = pool.install(|| match &cli.command {
        Command::Ml(a) => commands::ml(a, &mut manifest),
        Command::Solve(a) => commands::solve(a, &mut manifest),
        Command::Steer(a) => commands::steer(a, &mut manifest),
        Command::Sweep(a) => commands::sweep(a, &mut manifest),
        Command::Optimize(a) => commands::optimize(a, &mut manifest),
        Command::Check(a) => commands::check(a, cli.common.seed, &mut manifest),
    });
    let (code, message) = match result {
        Ok(done) => (done.code, done.message),
        Err(e) => (e.exit_code(), Some(e.to_string())),
    };
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(m) = &message {
        eprintln!("{}: {m}", if code == EXIT_NON_CONVERGENCE { "not converged" } else { "error" });
    }
    manifest.finish(start.elapsed(), code, message);
    let out = primary_out(&cli.command);
    if let Err(e) = manifest.emit(cli.common.manifest.as_deref(), out.as_deref()) {
        eprintln!("error: cannot write manifest: {e}");
        return if code == EXIT_OK { EXIT_CONFIG } else { code };
    }
    code
}
