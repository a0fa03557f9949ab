//! Command-line experiment runner.
//!
//! Each subcommand resolves a [`RunConfig`] (file values, then flag overrides), validates it,
//! runs one pipeline and writes JSON/CSV into the output directory. Exit codes:
//! 0 success, 2 configuration error, 3 budget exhausted or inconclusive, 4 I/O, 5 internal.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ModeArg, RunConfig};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "qlsc", version, about = "Depth-limited complexity experiments on weakly noisy quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Estimator mode for fidelities and Gram entries.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Worker threads (0 lets the runtime decide).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write a tidy `plot_data.csv`.
    #[arg(long, global = true)]
    pub emit_plot_data: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample (or load) circuit parameters and write the noisy state.
    Prepare,
    /// Binary search over depth with BMaxS at each probe.
    Scp,
    /// One GP-UCB maximization of the distinguishing loss.
    Bmaxs,
    /// Kernel-ridge check of the intrinsic-connection approximation.
    ValidateIntrinsic,
    /// Purity lower bound table, optionally with Monte-Carlo overlaps.
    PurityBound,
    /// Polynomial entropy estimate from trace powers.
    Entropy,
    /// Collect classical shadows and estimate probe fidelities.
    Shadows,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Prepare => "prepare",
            Command::Scp => "scp",
            Command::Bmaxs => "bmaxs",
            Command::ValidateIntrinsic => "validate-intrinsic",
            Command::PurityBound => "purity-bound",
            Command::Entropy => "entropy",
            Command::Shadows => "shadows",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Budget(String),
    Io(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::DimensionMismatch(_)
            | Error::InvalidQubit(_)
            | Error::InvalidArgument(_)
            | Error::CapExceeded { .. }
            | Error::SelfCheck(_) => CliError::Config(msg),
            Error::Io(_) | Error::Format(_) | Error::Json(_) => CliError::Io(msg),
            Error::NonUnitary { .. }
            | Error::IncompleteKraus { .. }
            | Error::InvalidState(_)
            | Error::Singular(_)
            | Error::InfeasibleDomain(_) => CliError::Internal(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// File values overridden by any flags that were given.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if cli.emit_plot_data {
        cfg.emit_plot_data = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| commands::dispatch(command, cfg))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match resolve_config(&cli).and_then(|cfg| execute(cli.command, &cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qlsc {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
