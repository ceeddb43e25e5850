//! Scenario runner for the nfkit library: TOML configs in, CSVs and a run
//! manifest out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;

pub use config::{parse_config, ExperimentKind, ScenarioConfig};
pub use error::CliError;
pub use manifest::{run_scenario, RunManifest};
