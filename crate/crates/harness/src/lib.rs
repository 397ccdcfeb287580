//! Experiment runner for `saddlekit`: configs, run records, rate fits and the
//! acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod record;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use fit::{fit_rate, RateFit};
pub use record::{ExperimentSummary, RunRecord};
