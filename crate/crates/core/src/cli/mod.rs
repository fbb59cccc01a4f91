//! Configuration files and the subcommand driver behind the `plaquesim`
//! binary.
//!
//! Configurations are strict INI text: sections `[params]` (dimensionless)
//! or `[dimensional]`, `[grid]`, `[run]` and `[sweep]`, `key = value` lines,
//! `#` or `;` comments. See [`KEYS`] for every key and its default.

mod config;
mod run;

pub use config::{
    parse_config, parse_config_str, GridConfig, ParamBlock, RunConfig, RunSection, SweepSection,
    KEYS,
};
pub use run::{relative_outputs, run_subcommand, RunFailure, RunOutcome, COMMANDS};
