//! Scenario runner: JSON configs in, deterministic JSON reports out, with
//! optional CSV trajectories and SVG plots.

pub mod config;
pub mod export;
pub mod presets;
pub mod run;

pub use config::{ScenarioConfig, SCENARIO_SCHEMA};
pub use presets::{preset, preset_with_seed, PRESET_NAMES};
pub use run::{run_scenario, Outcome, TracingReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] choreo_core::Error),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("io error: {0}")]
    Io(String),
}
