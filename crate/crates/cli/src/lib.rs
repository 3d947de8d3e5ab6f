//! Command-line front end for `pcm-core`.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::fmt;

/// Exit status plus the message printed to stderr.
///
/// `code` is 1 for failed runs or checks and 2 for bad usage or unreadable
/// input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<pcm_core::Error> for CliError {
    fn from(e: pcm_core::Error) -> Self {
        use pcm_core::Error as E;
        let code = match e {
            E::NonSquare { .. }
            | E::UnsupportedOrder(_)
            | E::NonPositiveEntry { .. }
            | E::DiagonalNotOne { .. }
            | E::ReciprocityViolation { .. }
            | E::NonPositiveWeight { .. }
            | E::DimensionMismatch { .. }
            | E::EmptyList
            | E::InvalidConfig(_)
            | E::Parse { .. } => 2,
            E::NoConvergence { .. } | E::EigenvalueMismatch { .. } | E::MissingRi(_) | E::EmptyBin => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::failure(e.to_string())
    }
}
