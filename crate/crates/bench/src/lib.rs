//! Benchmark harness for GM-oriented reference-set selection: experiment
//! configuration, the method roster, 5x2 cross-validation runs and reports.

pub mod config;
pub mod experiment;
pub mod methods;
pub mod report;
pub mod synthetic;
