//! Loads pipeline configs, executes them in any planning mode, and produces
//! run, discrepancy and benchmark reports.

pub mod bench;
pub mod compare;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod rng;

pub use config::{Pipeline, PipelineConfig, RunMode, Stage};
pub use error::{HarnessError, Result};

/// Version stamped into every report.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
