//! Wall-clock benchmarks.
//!
//! Kernel spectra are precomputed by an untimed warm-up run, matching how a
//! deployed network would hold them. Timings are medians over repetitions.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use specnet_core::oracle::direct_conv2;
use specnet_core::planner::PlanMode;
use specnet_core::spectral::{
    run_spectral_block_with, ActivationMode, KernelSet, KernelSpectrumCache, SpectralBlockConfig,
};
use specnet_core::{Dims, SpatialMap, TransformEngine};

use crate::config::Pipeline;
use crate::error::{HarnessError, Result};
use crate::pipeline::execute_with;
use crate::rng::Lcg;
use crate::ARTIFACT_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub index: usize,
    pub label: String,
    pub median_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTiming {
    pub mode: PlanMode,
    pub plan: String,
    pub transform_count: usize,
    pub median_seconds: f64,
    pub stages: Vec<StageTiming>,
    /// Every repetition produced the same output bits.
    pub bitwise_deterministic: bool,
}

/// Direct against spectral convolution for one square image size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPoint {
    pub n: Dims,
    pub k: Dims,
    pub direct_seconds: f64,
    pub spectral_seconds: f64,
    pub spectral_faster: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub artifact_version: String,
    pub seed: u64,
    pub repetitions: usize,
    pub n: Dims,
    pub k: Option<Dims>,
    pub modes: Vec<ModeTiming>,
    pub crossover: Vec<CrossoverPoint>,
    pub deterministic: bool,
}

impl BenchReport {
    pub fn mode(&self, mode: PlanMode) -> Option<&ModeTiming> {
        self.modes.iter().find(|m| m.mode == mode)
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

fn same_bits(a: &SpatialMap, b: &SpatialMap) -> bool {
    a.dims() == b.dims()
        && a.samples()
            .iter()
            .zip(b.samples())
            .all(|(x, y)| x.to_bits() == y.to_bits())
}

fn time_mode(pipeline: &Pipeline, mode: PlanMode, repetitions: usize) -> Result<ModeTiming> {
    let cache = KernelSpectrumCache::new();
    let reference = execute_with(pipeline, mode, &cache)?;
    let mut totals = Vec::with_capacity(repetitions);
    let mut per_stage = vec![Vec::with_capacity(repetitions); reference.stages.len()];
    let mut deterministic = true;
    for _ in 0..repetitions {
        let start = Instant::now();
        let run = execute_with(pipeline, mode, &cache)?;
        totals.push(start.elapsed().as_secs_f64());
        for (bucket, seconds) in per_stage.iter_mut().zip(&run.stage_seconds) {
            bucket.push(*seconds);
        }
        deterministic &= same_bits(&run.output, &reference.output);
    }
    Ok(ModeTiming {
        mode,
        plan: reference.plan.to_string(),
        transform_count: reference.counts.total(),
        median_seconds: median(&mut totals),
        stages: reference
            .stages
            .iter()
            .zip(per_stage.iter_mut())
            .map(|(record, samples)| StageTiming {
                index: record.index,
                label: record.label.clone(),
                median_seconds: median(samples),
            })
            .collect(),
        bitwise_deterministic: deterministic,
    })
}

/// Median seconds of direct and of spectral convolution of `image` with
/// `kernels`, with kernel spectra precomputed.
pub fn time_convolution(
    image: &SpatialMap,
    kernels: &KernelSet,
    repetitions: usize,
) -> Result<(f64, f64)> {
    let config = SpectralBlockConfig::with_activation(ActivationMode::None);
    let cache = KernelSpectrumCache::new();
    run_spectral_block_with(&TransformEngine::new(), &cache, image, kernels, config)?;

    let mut direct = Vec::with_capacity(repetitions);
    let mut spectral = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        let mut sum = direct_conv2(image, &kernels.kernels()[0]);
        for k in &kernels.kernels()[1..] {
            sum = sum.combine(1.0, &direct_conv2(image, k), 1.0)?;
        }
        direct.push(start.elapsed().as_secs_f64());
        std::hint::black_box(&sum);

        let start = Instant::now();
        let out = run_spectral_block_with(&TransformEngine::new(), &cache, image, kernels, config)?;
        spectral.push(start.elapsed().as_secs_f64());
        std::hint::black_box(&out);
    }
    Ok((median(&mut direct), median(&mut spectral)))
}

/// Square sizes 8, 16, 32, ... up to the pipeline's input side.
fn crossover_sides(n: Dims) -> Vec<usize> {
    let limit = n.height.max(n.width);
    std::iter::successors(Some(8usize), |s| Some(s * 2))
        .take_while(|&s| s <= limit)
        .collect()
}

pub fn benchmark(pipeline: &Pipeline, repetitions: usize) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(HarnessError::Config(
            "repetitions must be at least 1".into(),
        ));
    }
    let modes = PlanMode::ALL
        .iter()
        .map(|&mode| time_mode(pipeline, mode, repetitions))
        .collect::<Result<Vec<_>>>()?;

    let kernels = pipeline.first_kernels();
    let mut crossover = Vec::new();
    if let Some(kernels) = kernels {
        for side in crossover_sides(pipeline.input().dims()) {
            let image = Lcg::new(pipeline.seed).map(side, side)?;
            let (direct_seconds, spectral_seconds) =
                time_convolution(&image, kernels, repetitions)?;
            crossover.push(CrossoverPoint {
                n: image.dims(),
                k: kernels.dims(),
                direct_seconds,
                spectral_seconds,
                spectral_faster: spectral_seconds < direct_seconds,
            });
        }
    }

    Ok(BenchReport {
        artifact_version: ARTIFACT_VERSION.to_string(),
        seed: pipeline.seed,
        repetitions,
        n: pipeline.input().dims(),
        k: kernels.map(KernelSet::dims),
        deterministic: modes.iter().all(|m| m.bitwise_deterministic),
        modes,
        crossover,
    })
}
