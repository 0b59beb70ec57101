//! Scenario files, presets, the end-to-end runner, sweeps and the
//! matched-filter comparison behind the `spcfmcw` command.

pub mod config;
pub mod error;
pub mod mf;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::{load_layers, parse_keys, KeyMap, ScenarioConfig};
pub use error::{CliError, Result};
