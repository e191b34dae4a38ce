//! Front end for the `qdexciton` binary: configuration, spectrum runs and
//! the validation suite.

pub mod config;
pub mod output;
pub mod run;
pub mod validate;

use clap::{Parser, Subcommand};

pub use config::{parse_config, ConfigError, RunConfig, SpectrumArgs};
pub use run::{run_spectrum, RunSummary};
pub use validate::{run_validate, Level};

#[derive(Debug, Parser)]
#[command(
    name = "qdexciton",
    version,
    about = "Emission spectra of cavity-coupled Frenkel excitons"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a spectrum and write the table and line/peak report.
    Spectrum(Box<SpectrumArgs>),
    /// Run the built-in consistency checks.
    Validate {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
    },
}
