//! Command-line driver: ingest a commit log, replay it and write the
//! views, phase table and correlation outputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod git;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "testevo",
    version,
    about = "Test and production code co-evolution from version history"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metrics and entity tables plus the change and growth history views.
    Analyze(CommonArgs),
    /// Coverage evolution view from a per-release coverage report.
    Coverage(CommonArgs),
    /// Label windows of the history with co-evolution scenarios.
    Phases(CommonArgs),
    /// Scatter and correlation of test code share against coverage.
    Correlate(CommonArgs),
    /// Everything the given inputs allow.
    RunAll(CommonArgs),
    /// Produce a commit log and releases file from a git repository.
    ExportGit {
        repo: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => commands::cmd_analyze(&RunConfig::resolve(&args)?),
        Command::Coverage(args) => commands::cmd_coverage(&RunConfig::resolve(&args)?),
        Command::Phases(args) => commands::cmd_phases(&RunConfig::resolve(&args)?),
        Command::Correlate(args) => commands::cmd_correlate(&RunConfig::resolve(&args)?),
        Command::RunAll(args) => commands::cmd_run_all(&RunConfig::resolve(&args)?),
        Command::ExportGit { repo, out } => commands::cmd_export_git(&repo, &out),
    }
}
