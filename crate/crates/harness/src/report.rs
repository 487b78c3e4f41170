//! JSON reports.
//!
//! Floats are written by `serde_json` in shortest round-trip form, so every
//! report parses back to the identical values.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use specnet_core::metrics::max_relative_error;
use specnet_core::planner::{count_transforms, CostReport, PlanMode};
use specnet_core::{Dims, SpatialMap, TransformCounts};

use crate::config::{Pipeline, RunMode};
use crate::error::{HarnessError, Result};
use crate::pipeline::{execute, StageRecord};
use crate::ARTIFACT_VERSION;

/// Relative tolerance for a spectral run against the spatial reference.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub reference: RunMode,
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub counts_match: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub artifact_version: String,
    pub seed: u64,
    pub mode: RunMode,
    pub plan_mode: PlanMode,
    pub plan: String,
    pub input: Dims,
    pub output: Dims,
    pub predicted_transforms: usize,
    pub measured_transforms: TransformCounts,
    pub stages: Vec<StageRecord>,
    pub cost: CostReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<OracleCheck>,
}

/// Runs `pipeline` in `mode` and, if asked, against the spatial reference.
pub fn run_pipeline(
    pipeline: &Pipeline,
    mode: RunMode,
    check: bool,
) -> Result<(RunReport, SpatialMap)> {
    let run = execute(pipeline, mode.plan_mode())?;
    let predicted = count_transforms(&run.plan);
    let check = if check {
        let reference = execute(pipeline, PlanMode::Naive)?;
        let err = max_relative_error(run.output.samples(), reference.output.samples());
        let counts_match = run.counts.total() == predicted;
        Some(OracleCheck {
            reference: RunMode::Oracle,
            max_relative_error: err,
            tolerance: ORACLE_TOLERANCE,
            counts_match,
            passed: counts_match && err <= ORACLE_TOLERANCE,
        })
    } else {
        None
    };
    let report = RunReport {
        artifact_version: ARTIFACT_VERSION.to_string(),
        seed: pipeline.seed,
        mode,
        plan_mode: run.plan.mode,
        plan: run.plan.to_string(),
        input: pipeline.input().dims(),
        output: run.output.dims(),
        predicted_transforms: predicted,
        measured_transforms: run.counts,
        stages: run.stages,
        cost: run.cost,
        check,
    };
    Ok((report, run.output))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value)
        .expect("reports contain only finite numbers and string keys")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json(value);
    text.push('\n');
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })
}
