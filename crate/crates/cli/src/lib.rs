//! Experiment runner: config parsing, execution, artifact emission.

pub mod config;
pub mod runner;
