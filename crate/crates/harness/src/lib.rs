//! Experiment harness for the randomised product formulas: builtin models,
//! configurable sweeps, convergence fits, the validation suite and the
//! gate-complexity table.

pub mod config;
pub mod fit;
pub mod models;
pub mod simulate;
pub mod sweep;
pub mod table1;
pub mod validate;

/// Malformed user input: config, CLI arguments or environment.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);
