//! Experiment runner, hindsight comparators, output writers and property
//! suites for the online DR-submodular learners.

pub mod config;
pub mod error;
pub mod hindsight;
pub mod output;
pub mod runner;
pub mod stream;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{BenchError, BenchResult};
pub use runner::{run_experiment, run_replica, ExperimentOutcome, ReplicaOutcome, RoundRecord};
