//! Experiment runner over the `swigner` library: a registry of named
//! experiments with checked-in defaults, CSV artifacts and plot scripts.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod experiments;
pub mod registry;
pub mod report;

pub use config::Config;
pub use error::RunError;
pub use registry::{find, Experiment, REGISTRY};
pub use report::{Report, Table, Verdict};
