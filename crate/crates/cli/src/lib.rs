//! Configuration-driven runner for the toda-lab checks.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{
    cmd_coords, cmd_flow, cmd_grunsky, cmd_sigma, cmd_special, cmd_verify, ALL_CHECKS,
};
pub use config::ExperimentConfig;
pub use report::{Artifact, CheckResult, Report};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Toda(#[from] toda_lab::TodaError),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
