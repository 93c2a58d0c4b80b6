//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::{cmd_check, cmd_compute, cmd_cone, cmd_realize, cmd_roots, cmd_verify, RootsSource};
use crate::config::{Format, Overrides, RunConfig};
use crate::error::{CliError, ExitCode};

#[derive(Debug, Parser)]
#[command(name = "dualsteiner", version, about = "Dual quermassintegrals, realizability and dual Steiner roots")]
pub struct Cli {
    /// key=value configuration file; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Sphere grid resolution for every dimension (disables the exact zonal rule).
    #[arg(long, global = true, value_name = "N")]
    pub res: Option<usize>,
    /// Output file (a directory for `realize`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "json|csv", value_parser = parse_format)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: CliError| e.message)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dual quermassintegrals of a body pair.
    Compute {
        k: PathBuf,
        l: PathBuf,
        /// Comma-separated real indices; defaults to 0..=n.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        indices: Option<Vec<f64>>,
    },
    /// Realizability verdict for a tuple file.
    Check {
        tuple: PathBuf,
        /// Test the interior of one cyclic body instead of searching.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        interval: Option<Vec<f64>>,
    },
    /// Synthesize a witness pair for a tuple file.
    Realize { tuple: PathBuf },
    /// Roots of the dual Steiner polynomial of a pair or a tuple.
    Roots {
        #[arg(required_unless_present = "tuple", requires = "l")]
        k: Option<PathBuf>,
        l: Option<PathBuf>,
        #[arg(long, conflicts_with = "k")]
        tuple: Option<PathBuf>,
    },
    /// Boundary map of the root cone in dimension n.
    Cone {
        n: usize,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        /// Directory for the JSON witness sidecars.
        #[arg(long, value_name = "DIR")]
        witness_dir: Option<PathBuf>,
    },
    /// Inequality and identity suite for a pair.
    Verify { k: PathBuf, l: PathBuf },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn config_for(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides { seed: cli.seed, res: cli.res, out: cli.out.clone(), format: cli.format })?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<crate::commands::Output, CliError> {
    let cfg = config_for(cli)?;
    match &cli.command {
        Command::Compute { k, l, indices } => cmd_compute(k, l, indices.as_deref(), &cfg),
        Command::Check { tuple, interval } => cmd_check(tuple, interval.as_ref().map(|v| (v[0], v[1])), &cfg),
        Command::Realize { tuple } => cmd_realize(tuple, &cfg),
        Command::Roots { k, l, tuple } => {
            let source = match (k, l, tuple) {
                (_, _, Some(t)) => RootsSource::Tuple(t),
                (Some(k), Some(l), None) => RootsSource::Pair(k, l),
                _ => return Err(CliError::input("roots needs a body pair or --tuple")),
            };
            cmd_roots(source, &cfg)
        }
        Command::Cone { n, samples, witness_dir } => cmd_cone(*n, *samples, witness_dir.as_deref(), &cfg),
        Command::Verify { k, l } => cmd_verify(k, l, &cfg),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: ExitCode::Input.code(), stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli) {
        Ok(out) => Outcome { code: out.code.code(), stdout: out.stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: e.code.code(),
            stdout: e.stdout.unwrap_or_default(),
            stderr: format!("dualsteiner: {}\n", e.message),
        },
    }
}
