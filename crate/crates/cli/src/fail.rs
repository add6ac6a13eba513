//! The exit-code contract: 0 ok, 1 domain failure, 2 I/O or usage.
//!
//! A *domain* failure means the inputs were read but the data refuses the
//! operation (rejected lines, no admissible windows, fold leakage, an
//! infeasible plant). *Usage* covers everything that stops the inputs from
//! being read at all: missing or unreadable files, malformed config syntax,
//! bad flag values.

use std::fmt::Display;
use std::process::ExitCode;

use thiserror::Error;
use wardlens_core::config::ConfigError;
use wardlens_synth::SynthError;

/// A command failure carrying its exit class.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    /// Data-level failure: exit 1.
    #[error("{0}")]
    Domain(String),
    /// I/O or usage failure: exit 2.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// The process exit code for this failure.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Domain(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
        }
    }
}

/// Builds a domain failure (exit 1) from any displayable error.
pub fn domain(err: impl Display) -> CliError {
    CliError::Domain(err.to_string())
}

/// Builds a usage/I/O failure (exit 2) from any displayable error.
pub fn usage(err: impl Display) -> CliError {
    CliError::Usage(err.to_string())
}

/// Classifies a config error: syntax and typo problems are usage; a window
/// override that violates a domain rule (e.g. the pre-event exclusion gap)
/// is a domain failure.
pub fn from_config(err: ConfigError) -> CliError {
    match err {
        ConfigError::Align(inner) => domain(inner),
        other => usage(other),
    }
}

/// Classifies a generator error: config syntax is usage; semantic
/// infeasibility (impossible plant, bad probability, zero patients) is a
/// domain failure.
pub fn from_synth(err: SynthError) -> CliError {
    match err {
        SynthError::Config(inner) => from_config(inner),
        SynthError::BadValue { .. } => usage(err),
        other => domain(other),
    }
}
