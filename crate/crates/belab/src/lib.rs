//! Experiment runner on top of `belab_core`: configuration, parallel Monte
//! Carlo, and CSV/JSON/SVG artifacts. The `belab` binary is a thin wrapper
//! around [`run_experiment`].

pub mod config;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod output;
pub mod svg;

pub use config::{ExperimentConfig, ExperimentKind, MethodChoice, ModelTemplate};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, Report};
pub use montecarlo::Sampler;
