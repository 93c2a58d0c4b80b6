//! Command-line front end for `dualsteiner-core`.
//!
//! Every subcommand is a library function returning its stdout text, so the
//! binary only prints and exits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod json;

pub use app::{run, Cli, Command, Outcome};
pub use commands::{cmd_check, cmd_compute, cmd_cone, cmd_realize, cmd_roots, cmd_verify, Output, RootsSource};
pub use config::{Format, Overrides, RunConfig};
pub use error::{CliError, ExitCode};
