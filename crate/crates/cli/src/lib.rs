//! Configuration, orchestration and file output for the `slabdft` binary.

pub mod config;
pub mod output;
pub mod report;
pub mod run;

pub use config::{load_config, CaseName, Model, RunConfig};
pub use run::{run, RunOutcome};
