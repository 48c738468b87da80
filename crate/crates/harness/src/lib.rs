//! Experiment harness: configuration, runs, tables, plots and resource counts.

// comparisons are negated on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod resources;
pub mod run;

pub use config::{resolve, ExperimentConfig, FileConfig, Mode, NoiseSpec, OmegaTau, Overrides};
pub use error::{HarnessError, Result};
pub use resources::{resource_report, ResourceReport};
pub use run::{run_experiment, RunReport};
