//! Front-end plumbing for the `tcollapse` binary: configuration files,
//! subcommands and bit-stable CSV/JSON output.

pub mod commands;
pub mod emit;
pub mod error;
pub mod settings;

pub use error::{CliError, CliResult};
pub use settings::Settings;
