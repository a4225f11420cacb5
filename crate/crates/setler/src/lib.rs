//! Command-line front end, config handling and artifact output for
//! `setler-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;

pub use commands::{run, Command, Outcome, RunError};
pub use config::{ConfigError, Settings, KEYS};
pub use parallel::Parallel;
