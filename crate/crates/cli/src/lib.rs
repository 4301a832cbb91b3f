//! File formats and command implementations behind the `cawgr` binary.
//!
//! All formats are line-based text: an INI-style config, a CSV assignment
//! table and a CSV metrics report. Every command is deterministic; equal
//! inputs give byte-identical stdout and output files.

pub mod commands;
pub mod config;
pub mod metrics;
pub mod table;

pub use commands::{Cli, Command, ExitCode};
pub use config::{Config, ConfigError, SolverConfig, SolverKind};
