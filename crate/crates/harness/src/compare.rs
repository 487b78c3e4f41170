//! Mask activation versus a true `max(0, x)`.
//!
//! Masking to the support box leaves negative convolution outputs alone;
//! ReLU zeroes them. This module runs both and reports where and by how much
//! the results differ.

use serde::{Deserialize, Serialize};
use specnet_core::metrics::{max_abs_diff, rms_diff};
use specnet_core::planner::PlanMode;
use specnet_core::spectral::ActivationMode;
use specnet_core::{Dims, SpatialMap};

use crate::config::Pipeline;
use crate::error::Result;
use crate::pipeline::{execute, StageRecord};
use crate::ARTIFACT_VERSION;

/// Pixels differ when they are further apart than this times
/// `max(1, max |paper_mask output|)`.
pub const DIFFERENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub activation: ActivationMode,
    pub plan: String,
    pub transform_count: usize,
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub artifact_version: String,
    pub seed: u64,
    pub mode: PlanMode,
    pub output: Dims,
    pub max_abs_diff: f64,
    pub rms_diff: f64,
    pub fraction_of_pixels_differing: f64,
    pub threshold: f64,
    /// `[row, col]` of every pixel where the two outputs differ.
    pub differing_pixels: Vec<[usize; 2]>,
    /// `[row, col]` of every pixel where the mask output is below `-threshold`.
    /// For a single activation at the end of the chain these are exactly the
    /// differing pixels; earlier activations also shift downstream values.
    pub negative_pixels: Vec<[usize; 2]>,
    pub paper_mask: ModeSummary,
    pub true_relu_roundtrip: ModeSummary,
}

impl DiscrepancyReport {
    pub fn differences_match_negatives(&self) -> bool {
        self.differing_pixels == self.negative_pixels
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: DiscrepancyReport,
    pub paper_mask: SpatialMap,
    pub true_relu: SpatialMap,
}

fn pixels(dims: Dims, mut keep: impl FnMut(usize) -> bool) -> Vec<[usize; 2]> {
    (0..dims.len())
        .filter(|&i| keep(i))
        .map(|i| [i / dims.width, i % dims.width])
        .collect()
}

/// Runs both activation modes concurrently under the same plan mode.
pub fn compare_modes(pipeline: &Pipeline, mode: PlanMode) -> Result<Comparison> {
    let masked = pipeline.with_activation(ActivationMode::PaperMask);
    let relu = pipeline.with_activation(ActivationMode::TrueReluRoundtrip);
    let (masked_run, relu_run) = rayon::join(|| execute(&masked, mode), || execute(&relu, mode));
    let (masked_run, relu_run) = (masked_run?, relu_run?);

    let a = masked_run.output.samples();
    let b = relu_run.output.samples();
    let dims = masked_run.output.dims();
    let threshold = DIFFERENCE_TOLERANCE * masked_run.output.max_abs().max(1.0);
    let differing_pixels = pixels(dims, |i| (a[i] - b[i]).abs() > threshold);
    let negative_pixels = pixels(dims, |i| a[i] < -threshold);

    let summary = |activation, run: &crate::pipeline::PipelineRun| ModeSummary {
        activation,
        plan: run.plan.to_string(),
        transform_count: run.counts.total(),
        stages: run.stages.clone(),
    };
    let report = DiscrepancyReport {
        artifact_version: ARTIFACT_VERSION.to_string(),
        seed: pipeline.seed,
        mode,
        output: dims,
        max_abs_diff: max_abs_diff(a, b),
        rms_diff: rms_diff(a, b),
        fraction_of_pixels_differing: differing_pixels.len() as f64 / dims.len() as f64,
        threshold,
        differing_pixels,
        negative_pixels,
        paper_mask: summary(ActivationMode::PaperMask, &masked_run),
        true_relu_roundtrip: summary(ActivationMode::TrueReluRoundtrip, &relu_run),
    };
    Ok(Comparison {
        report,
        paper_mask: masked_run.output,
        true_relu: relu_run.output,
    })
}
