//! Executes a planned pipeline.
//!
//! Spatial stages use the brute-force operations from the oracle module;
//! spectral stages stay on the padded spectrum between one forward and one
//! inverse transform. Every image transform goes through a single
//! [`TransformEngine`], so the measured count can be checked against the plan.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use specnet_core::oracle::{
    direct_conv2, position_mask, relu_pointwise, truncation_lowpass_oracle, SupportBox,
};
use specnet_core::planner::{
    cost_estimate, count_transforms, place_transforms, CostReport, Domain, PlanMode, PlannedGraph,
    PlannedNode, PlannedOp,
};
use specnet_core::spectral::{
    multichannel_spectral_conv, resample_spectrum, spectral_activation, spectral_pool,
    ActivationMode, KernelSet, KernelSpectrumCache,
};
use specnet_core::{SpatialMap, SpectralError, SpectralMap, TransformCounts, TransformEngine};

use crate::config::{Pipeline, Stage};
use crate::error::{HarnessError, Result};

/// Transforms spent by one planned node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub index: usize,
    pub label: String,
    pub domain: String,
    pub forward: usize,
    pub inverse: usize,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub output: SpatialMap,
    pub plan: PlannedGraph,
    pub cost: CostReport,
    pub counts: TransformCounts,
    pub stages: Vec<StageRecord>,
    /// Wall-clock seconds per planned node, parallel to `stages`.
    pub stage_seconds: Vec<f64>,
}

enum Value {
    Spatial(SpatialMap),
    Spectral(SpectralMap),
}

type StepResult<T> = std::result::Result<T, SpectralError>;

fn misplaced(what: &str) -> SpectralError {
    SpectralError::MalformedGraph(format!("{what} reached in the wrong domain"))
}

fn sum_direct(map: &SpatialMap, kernels: &KernelSet) -> StepResult<SpatialMap> {
    let mut channels = kernels.kernels().iter().map(|k| direct_conv2(map, k));
    let first = channels.next().ok_or(SpectralError::EmptyKernelSet)?;
    channels.try_fold(first, |acc, c| acc.combine(1.0, &c, 1.0))
}

fn spatial_stage(stage: &Stage, map: SpatialMap) -> StepResult<SpatialMap> {
    match stage {
        Stage::Conv(kernels) => sum_direct(&map, kernels),
        Stage::Activation(ActivationMode::PaperMask) => {
            position_mask(&map, SupportBox::from(map.dims()))
        }
        Stage::Activation(ActivationMode::TrueReluRoundtrip) => Ok(relu_pointwise(&map)),
        Stage::Activation(ActivationMode::None) | Stage::Boundary => Ok(map),
        Stage::Pool(out) => truncation_lowpass_oracle(&map, out.height, out.width),
    }
}

fn spectral_stage(
    cache: &KernelSpectrumCache,
    stage: &Stage,
    spec: SpectralMap,
) -> StepResult<SpectralMap> {
    match stage {
        Stage::Conv(kernels) => {
            let support = spec.source().full_conv(kernels.dims());
            let spec = if support.fits_in(spec.padded()) {
                spec
            } else {
                resample_spectrum(&spec, spec.padded().max(support))?
            };
            let kernel_specs = kernels
                .kernels()
                .iter()
                .map(|k| cache.spectrum(k, spec.padded()))
                .collect::<StepResult<Vec<_>>>()?;
            let refs: Vec<&SpectralMap> = kernel_specs.iter().map(|k| k.as_ref()).collect();
            multichannel_spectral_conv(&spec, &refs)
        }
        Stage::Activation(ActivationMode::PaperMask) => {
            spectral_activation(&spec, SupportBox::from(spec.source()))
        }
        Stage::Activation(ActivationMode::None) => Ok(spec),
        Stage::Activation(ActivationMode::TrueReluRoundtrip) => Err(misplaced("relu activation")),
        Stage::Pool(out) => {
            let spec = if spec.padded() == spec.source() {
                spec
            } else {
                resample_spectrum(&spec, spec.source())?
            };
            spectral_pool(&spec, out.height, out.width)
        }
        Stage::Boundary => Err(misplaced("boundary")),
    }
}

fn step(
    engine: &TransformEngine,
    cache: &KernelSpectrumCache,
    node: &PlannedNode,
    stage: Option<&Stage>,
    value: Value,
) -> StepResult<Value> {
    match (node.op, stage, value) {
        (PlannedOp::ForwardTransform, _, Value::Spatial(map)) => {
            let pad = node.pad().unwrap_or(map.dims());
            Ok(Value::Spectral(engine.forward(&map, pad)?))
        }
        (PlannedOp::InverseTransform, _, Value::Spectral(spec)) => {
            Ok(Value::Spatial(engine.inverse(&spec)?.crop(spec.source())?))
        }
        (PlannedOp::Layer(_), Some(stage), Value::Spatial(map)) => {
            spatial_stage(stage, map).map(Value::Spatial)
        }
        (PlannedOp::Layer(_), Some(stage), Value::Spectral(spec)) => {
            spectral_stage(cache, stage, spec).map(Value::Spectral)
        }
        _ => Err(misplaced(node.label())),
    }
}

/// Runs the pipeline with a fresh kernel-spectrum cache.
pub fn execute(pipeline: &Pipeline, mode: PlanMode) -> Result<PipelineRun> {
    execute_with(pipeline, mode, &KernelSpectrumCache::new())
}

/// Runs the pipeline; kernel spectra come from `cache` and are not counted.
///
/// Fails with [`HarnessError::CountMismatch`] if the engine performed a
/// different number of transforms than the plan contains.
pub fn execute_with(
    pipeline: &Pipeline,
    mode: PlanMode,
    cache: &KernelSpectrumCache,
) -> Result<PipelineRun> {
    let plan = place_transforms(pipeline.graph(), mode)?;
    let cost = cost_estimate(&plan)?;
    let engine = TransformEngine::new();
    let mut layers = pipeline.stages().iter();
    let mut value = Value::Spatial(pipeline.input().clone());
    let mut stages = Vec::with_capacity(plan.nodes.len());
    let mut stage_seconds = Vec::with_capacity(plan.nodes.len());

    for (index, node) in plan.nodes.iter().enumerate() {
        let stage = match node.op {
            PlannedOp::Layer(_) => layers.next(),
            _ => None,
        };
        let before = engine.counts();
        let start = Instant::now();
        value = step(&engine, cache, node, stage, value).map_err(|source| HarnessError::Stage {
            index,
            label: node.label().to_string(),
            source,
        })?;
        stage_seconds.push(start.elapsed().as_secs_f64());
        let after = engine.counts();
        stages.push(StageRecord {
            index,
            label: node.label().to_string(),
            domain: match node.domain {
                Domain::Spatial => "spatial".into(),
                Domain::Spectral { .. } => "spectral".into(),
            },
            forward: after.forward - before.forward,
            inverse: after.inverse - before.inverse,
        });
    }

    let Value::Spatial(output) = value else {
        return Err(
            SpectralError::MalformedGraph("plan ended in the frequency domain".into()).into(),
        );
    };
    let counts = engine.counts();
    let predicted = count_transforms(&plan);
    if counts.total() != predicted {
        return Err(HarnessError::CountMismatch {
            predicted,
            measured: counts.total(),
        });
    }
    Ok(PipelineRun {
        output,
        plan,
        cost,
        counts,
        stages,
        stage_seconds,
    })
}
