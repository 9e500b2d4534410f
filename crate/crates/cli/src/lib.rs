//! `legkit` command-line front-end.
//!
//! Each subcommand reads one JSON config (unknown keys rejected), runs the
//! corresponding library pipeline and writes CSV, JSON, SVG and text
//! artifacts into the output directory. Every artifact carries the SHA-256 of
//! the effective config so runs can be matched to their inputs.

use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

pub use output::Output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{message}")]
    Infeasible { message: String, diagnostics: serde_json::Value },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Infeasible { .. } => 2,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "legkit", version, about = "Walking-leg mechanism design toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for one per core. Results do not depend on it.
    #[arg(long, global = true, env = "LEGKIT_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// LP-tau scan of the leg linkage with feasibility and Pareto filtering.
    Synth,
    /// NSGA-II on the two-objective leg problem.
    Pareto,
    /// Isotropy residuals and condition number of a tripod configuration.
    Isotropy,
    /// Mobility and rationality table for mechanism schemes.
    Mobility,
    /// EKF-SLAM run with occupancy mapping and path planning.
    Slam,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_deref();
    match cli.command {
        Command::Synth => commands::synth::main(path, &cli.out).map(|_| ()),
        Command::Pareto => commands::pareto::main(path, &cli.out, cli.seed).map(|_| ()),
        Command::Isotropy => commands::isotropy::main(path, &cli.out).map(|_| ()),
        Command::Mobility => commands::mobility::main(path, &cli.out).map(|_| ()),
        Command::Slam => commands::slam::main(path, &cli.out, cli.seed).map(|_| ()),
    }
}
