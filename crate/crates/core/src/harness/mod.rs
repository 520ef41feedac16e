//! Experiment harness: baselines, PAC audits, concentration-event
//! falsification, worst-case bounds and the multi-seed runner.

pub mod audit;
pub mod baselines;
pub mod bounds;
pub mod experiment;
pub mod falsifier;

pub use experiment::{reaudit, run_experiment, Algorithm, ExperimentConfig, RunReport};
