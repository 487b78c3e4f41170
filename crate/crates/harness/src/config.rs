//! Pipeline configs.
//!
//! ```json
//! {
//!   "input": { "synthetic": { "height": 32, "width": 32 } },
//!   "seed": 7,
//!   "mode": "fused",
//!   "kernels": [
//!     { "name": "edge", "path": "edge.csv" },
//!     { "name": "r1", "synthetic": { "height": 3, "width": 3 } }
//!   ],
//!   "ops": [
//!     { "op": "conv", "kernels": ["edge", "r1"] },
//!     { "op": "activation", "mode": "paper_mask" },
//!     { "op": "pool", "height": 16, "width": 16 },
//!     { "op": "boundary" }
//!   ]
//! }
//! ```
//!
//! Paths are relative to the config file. Synthetic maps draw from one
//! [`Lcg`] seeded with `seed`: the input first, then kernels in the order
//! they are listed.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use specnet_core::planner::{LayerGraph, LayerKind, PlanMode};
use specnet_core::spectral::{ActivationMode, KernelSet};
use specnet_core::{Dims, SpatialMap};

use crate::csv_io::read_map;
use crate::error::{HarnessError, Result};
use crate::rng::Lcg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSource {
    Path(PathBuf),
    Synthetic { height: usize, width: usize },
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDef {
    pub name: String,
    #[serde(flatten)]
    pub source: MapSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpSpec {
    Conv {
        kernels: Vec<String>,
    },
    Activation {
        #[serde(default = "default_activation")]
        mode: ActivationMode,
    },
    Pool {
        height: usize,
        width: usize,
    },
    Boundary,
}

fn default_activation() -> ActivationMode {
    ActivationMode::PaperMask
}

/// Planning mode as named on the command line. `oracle` runs the all-spatial
/// reference pipeline, which is the naive plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Naive,
    Legacy,
    #[default]
    Fused,
    Oracle,
}

impl RunMode {
    pub fn plan_mode(self) -> PlanMode {
        match self {
            RunMode::Naive | RunMode::Oracle => PlanMode::Naive,
            RunMode::Legacy => PlanMode::LegacySpectral,
            RunMode::Fused => PlanMode::FusedSpectral,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Naive => "naive",
            RunMode::Legacy => "legacy",
            RunMode::Fused => "fused",
            RunMode::Oracle => "oracle",
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(RunMode::Naive),
            "legacy" | "legacy_spectral" => Ok(RunMode::Legacy),
            "fused" | "fused_spectral" => Ok(RunMode::Fused),
            "oracle" => Ok(RunMode::Oracle),
            other => Err(HarnessError::Config(format!(
                "unknown mode '{other}' (expected naive, legacy, fused or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: MapSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub kernels: Vec<KernelDef>,
    pub ops: Vec<OpSpec>,
}

impl PipelineConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        PipelineConfig::from_json(&text, path)
    }

    /// Loads every map and checks that shapes line up through the chain.
    pub fn resolve(&self, base_dir: &Path) -> Result<Pipeline> {
        let mut rng = Lcg::new(self.seed);
        let mut load = |source: &MapSource, what: &str| -> Result<SpatialMap> {
            match source {
                MapSource::Path(p) => read_map(&base_dir.join(p)),
                MapSource::Synthetic { height, width } => Ok(rng.map(*height, *width)?),
                MapSource::Rows(rows) => SpatialMap::from_rows(rows)
                    .map_err(|e| HarnessError::Config(format!("{what}: {e}"))),
            }
        };

        let input = load(&self.input, "input")?;
        let mut kernels: HashMap<&str, SpatialMap> = HashMap::new();
        for def in &self.kernels {
            let map = load(&def.source, &format!("kernel '{}'", def.name))?;
            if kernels.insert(def.name.as_str(), map).is_some() {
                return Err(HarnessError::Config(format!(
                    "kernel '{}' is defined twice",
                    def.name
                )));
            }
        }

        let stages = self
            .ops
            .iter()
            .enumerate()
            .map(|(i, op)| {
                Ok(match op {
                    OpSpec::Conv { kernels: names } => {
                        let maps = names
                            .iter()
                            .map(|name| {
                                kernels.get(name.as_str()).cloned().ok_or_else(|| {
                                    HarnessError::Config(format!(
                                        "op {i} refers to unknown kernel '{name}'"
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Stage::Conv(
                            KernelSet::new(maps)
                                .map_err(|e| HarnessError::Config(format!("op {i}: {e}")))?,
                        )
                    }
                    OpSpec::Activation { mode } => Stage::Activation(*mode),
                    OpSpec::Pool { height, width } => Stage::Pool(Dims::new(*height, *width)),
                    OpSpec::Boundary => Stage::Boundary,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Pipeline::new(self.seed, self.mode, input, stages)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Conv(KernelSet),
    Activation(ActivationMode),
    Pool(Dims),
    Boundary,
}

impl Stage {
    pub fn kind(&self) -> LayerKind {
        match self {
            Stage::Conv(set) => LayerKind::Convolution {
                kernel: set.dims(),
                channels: set.channel_count(),
            },
            Stage::Activation(mode) => LayerKind::Activation { mode: *mode },
            Stage::Pool(out) => LayerKind::Pooling { out: *out },
            Stage::Boundary => LayerKind::Boundary,
        }
    }
}

/// A resolved config: loaded maps plus the layer graph they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub seed: u64,
    pub mode: RunMode,
    input: SpatialMap,
    stages: Vec<Stage>,
    graph: LayerGraph,
}

impl Pipeline {
    pub fn new(seed: u64, mode: RunMode, input: SpatialMap, stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(HarnessError::Config("pipeline has no ops".into()));
        }
        let graph = LayerGraph::chain(input.dims(), stages.iter().map(Stage::kind))
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(Pipeline {
            seed,
            mode,
            input,
            stages,
            graph,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_file(path)?.resolve(base)
    }

    pub fn input(&self) -> &SpatialMap {
        &self.input
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn graph(&self) -> &LayerGraph {
        &self.graph
    }

    /// Same pipeline with every activation switched to `mode`.
    pub fn with_activation(&self, mode: ActivationMode) -> Pipeline {
        let stages: Vec<Stage> = self
            .stages
            .iter()
            .map(|s| match s {
                Stage::Activation(_) => Stage::Activation(mode),
                other => other.clone(),
            })
            .collect();
        Pipeline::new(self.seed, self.mode, self.input.clone(), stages)
            .expect("activation mode does not change shapes")
    }

    /// First convolution's kernel set, if any.
    pub fn first_kernels(&self) -> Option<&KernelSet> {
        self.stages.iter().find_map(|s| match s {
            Stage::Conv(set) => Some(set),
            _ => None,
        })
    }
}
