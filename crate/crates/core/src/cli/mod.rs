//! Command-line front end: `info`, `region <kind>`, `simulate` and
//! `check <which>` over a JSON source description.
//!
//! Exit status is 0 on success, 2 for parse and validation errors, 3 when a
//! precondition fails (Markov conditions, size guards) and 4 when an
//! internal invariant is violated.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{check, info, region, simulate, CheckKind, SANDWICH_TOL};
pub use config::{
    digest, parse_config, parse_config_str, resolve, ChainSpec, ConfigFile, Options, Resolved, Source, VariableSpec,
};
pub use output::{render_structured, render_table, Cell, CommandOutput, RunManifest, Table};

use crate::error::Error;
use crate::regions::RegionKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("role error: {0}")]
    Role(String),

    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                Error::NotMarkov { .. }
                | Error::MarkovPreconditionFailed { .. }
                | Error::IndependenceFailed(_)
                | Error::TooLarge(_)
                | Error::AlphabetTooLarge { .. }
                | Error::NotInPin(_),
            ) => EXIT_PRECONDITION,
            CliError::Core(Error::InvariantViolation(_)) => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Degraded,
    Markov,
    Sandwich,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information measures for the declared roles.
    Info,
    /// Constants, inequalities and (for theorem1 kinds) frontier samples of a region.
    Region {
        /// One of theorem1-inner, theorem1-outer-overapprox, corollary1,
        /// corollary2, lemma1, eve-si-at-bob, eve-si-at-alice, corollary3,
        /// corollary4, corollary5.
        kind: String,
    },
    /// Monte Carlo error rate and exact equivocation of the binning scheme.
    Simulate,
    /// Degradedness, Markov residuals or inner/outer consistency.
    Check {
        #[arg(value_enum)]
        which: CheckArg,
    },
}

#[derive(Debug, Parser)]
#[command(name = "swsec", version, about = "Compression-equivocation regions and binning simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON source description.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides options.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file, standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
}

impl Command {
    fn label(&self) -> String {
        match self {
            Command::Info => "info".into(),
            Command::Region { kind } => format!("region {kind}"),
            Command::Simulate => "simulate".into(),
            Command::Check { which } => format!(
                "check {}",
                which.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default()
            ),
        }
    }
}

/// Output text plus the status the process should exit with.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub text: String,
    pub violation: Option<String>,
}

/// Runs a command against an already resolved configuration.
pub fn execute(command: &Command, resolved: &Resolved) -> Result<CommandOutput, CliError> {
    match command {
        Command::Info => info(resolved),
        Command::Region { kind } => {
            let k = RegionKind::parse(kind).ok_or_else(|| {
                let known: Vec<&str> = RegionKind::ALL.iter().map(|k| k.name()).collect();
                CliError::Validation(format!("unknown region kind `{kind}`, expected one of {}", known.join(", ")))
            })?;
            region(resolved, k)
        }
        Command::Simulate => simulate(resolved),
        Command::Check { which } => check(
            resolved,
            match which {
                CheckArg::Degraded => CheckKind::Degraded,
                CheckArg::Markov => CheckKind::Markov,
                CheckArg::Sandwich => CheckKind::Sandwich,
            },
        ),
    }
}

/// Parses the config, runs the command and renders the result.
pub fn run(cli: &Cli) -> Result<Rendered, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("--config <path> is required".into()))?;
    let resolved = resolve(parse_config(path)?, cli.seed)?;
    let output = execute(&cli.command, &resolved)?;
    let manifest = RunManifest::new(cli.command.label(), resolved.digest(), resolved.seed());
    let text = match cli.format {
        Format::Table => render_table(&manifest, &output),
        Format::Structured => render_structured(&manifest, &resolved.config, &output),
    };
    Ok(Rendered {
        text,
        violation: output.violation,
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            })
        }
    }
}

/// Entry point for the binary; returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = run(&cli).and_then(|r| emit(&cli, &r.text).map(|_| r));
    match result {
        Ok(Rendered { violation: None, .. }) => EXIT_OK,
        Ok(Rendered {
            violation: Some(msg), ..
        }) => {
            eprintln!("error: invariant violated: {msg}");
            EXIT_INVARIANT
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
