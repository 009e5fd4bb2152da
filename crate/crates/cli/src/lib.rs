//! Reproducible experiments for one-bit MIMO radar detection: false-alarm and
//! detection curves, SNR and block-length sweeps, goodness-of-fit errors and
//! the one-bit loss constants, written as CSV with a JSON metadata line.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::run;
pub use config::{Command, ExperimentConfig, Overrides};
pub use error::{CliError, CliResult};
pub use table::{Report, Table};
