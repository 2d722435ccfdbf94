//! The `cmpk` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or model
//! domain error, 3 invalid space.

pub mod commands;
pub mod config;
pub mod output;

use cmpk_core::mesh::MeshError;
use cmpk_core::SpaceError;
use thiserror::Error;

use config::{Cli, Command, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
    #[error("invalid space: {0}")]
    Space(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) | CliError::Domain(_) => 2,
            CliError::Space(_) => 3,
        }
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::BadCoordinates(_) => CliError::Config(e.to_string()),
            SpaceError::Mesh(MeshError::Io { .. }) => CliError::Io(e.to_string()),
            e => CliError::Space(e.to_string()),
        }
    }
}

/// Runs one invocation, printing a one-line result to stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (name, args) = match &cli.command {
        Command::Model { query } => {
            println!("{}", commands::cmd_model(query)?);
            return Ok(());
        }
        Command::Test(a) => ("test", a),
        Command::Estimate(a) => ("estimate", a),
        Command::Profile(a) => ("profile", a),
        Command::Report(a) => ("report", a),
        Command::Mesh(a) => ("mesh", a),
    };
    let cfg = RunConfig::resolve(name, args)?;
    log::info!("running {name} on {:?}", cfg.space);
    let (rows, summary, line) = if name == "mesh" {
        commands::run_mesh(&cfg)?
    } else {
        commands::run_command(&cfg)?
    };
    println!("{line}");
    println!("rows: {}", rows.display());
    println!("summary: {}", summary.display());
    Ok(())
}
