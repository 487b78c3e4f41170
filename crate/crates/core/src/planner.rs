//! Transform placement over a chain of layers.
//!
//! Three placements are supported:
//!
//! ```text
//! naive   C A C A                      (everything spatial, no transforms)
//! legacy  F C F^-1 A F C F^-1 A        (each convolution wrapped on its own)
//! fused   F C A C A F^-1               (one pair per maximal spectral run)
//! ```
//!
//! A spectral run is any sequence of convolutions, mask activations and
//! poolings. Boundary nodes (fully connected layers and the like) and
//! activations that need the true `max(0, x)` stay spatial and split runs.
//!
//! Planning only looks at node kinds and shapes, never at sample data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::maps::Dims;
use crate::spectral::ActivationMode;

/// Flops per point per `log2` level of a transform.
pub const TRANSFORM_COST: f64 = 5.0;
/// Flops per point of a complex multiply-add.
pub const SPECTRAL_POINT_COST: f64 = 6.0;
/// Flops per real multiply-add of direct convolution.
pub const DIRECT_COST: f64 = 2.0;
/// Flops per point per `log2` level for a mask activation evaluated through
/// embedded transforms.
pub const EMBEDDED_ACTIVATION_COST: f64 = TRANSFORM_COST;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Naive,
    LegacySpectral,
    FusedSpectral,
}

impl PlanMode {
    pub const ALL: [PlanMode; 3] = [
        PlanMode::Naive,
        PlanMode::LegacySpectral,
        PlanMode::FusedSpectral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::Naive => "naive",
            PlanMode::LegacySpectral => "legacy_spectral",
            PlanMode::FusedSpectral => "fused_spectral",
        }
    }
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlanMode {
    type Err = SpectralError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(PlanMode::Naive),
            "legacy" | "legacy_spectral" => Ok(PlanMode::LegacySpectral),
            "fused" | "fused_spectral" => Ok(PlanMode::FusedSpectral),
            other => Err(SpectralError::Config(format!(
                "unknown planning mode '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerKind {
    Convolution { kernel: Dims, channels: usize },
    Activation { mode: ActivationMode },
    Pooling { out: Dims },
    Boundary,
}

impl LayerKind {
    pub fn conv(kernel_height: usize, kernel_width: usize) -> Self {
        LayerKind::Convolution {
            kernel: Dims::new(kernel_height, kernel_width),
            channels: 1,
        }
    }

    pub fn activation() -> Self {
        LayerKind::Activation {
            mode: ActivationMode::PaperMask,
        }
    }

    pub fn pool(height: usize, width: usize) -> Self {
        LayerKind::Pooling {
            out: Dims::new(height, width),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LayerKind::Convolution { .. } => "C",
            LayerKind::Activation { .. } => "A",
            LayerKind::Pooling { .. } => "P",
            LayerKind::Boundary => "B",
        }
    }

    /// Whether the fused placement may keep this node in the frequency domain.
    pub fn is_spectral(&self) -> bool {
        match self {
            LayerKind::Convolution { .. } | LayerKind::Pooling { .. } => true,
            LayerKind::Activation { mode } => *mode != ActivationMode::TrueReluRoundtrip,
            LayerKind::Boundary => false,
        }
    }

    /// Output size for a given input size.
    pub fn output(&self, input: Dims) -> Dims {
        match *self {
            LayerKind::Convolution { kernel, .. } => input.full_conv(kernel),
            LayerKind::Pooling { out } => out,
            LayerKind::Activation { .. } | LayerKind::Boundary => input,
        }
    }
}

/// A layer with optional shape metadata (its input size in pixels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerNode {
    #[serde(flatten)]
    pub kind: LayerKind,
    pub input: Option<Dims>,
}

impl LayerNode {
    pub fn output(&self) -> Option<Dims> {
        self.input.map(|d| self.kind.output(d))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerGraph {
    nodes: Vec<LayerNode>,
}

impl LayerGraph {
    pub fn new(nodes: Vec<LayerNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(SpectralError::MalformedGraph("graph has no nodes".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            match node.kind {
                LayerKind::Convolution { kernel, channels }
                    if kernel.is_empty() || channels == 0 =>
                {
                    return Err(SpectralError::MalformedGraph(format!(
                        "convolution {i} needs a non-empty kernel and at least one channel"
                    )));
                }
                LayerKind::Pooling { out }
                    if out.is_empty() || node.input.is_some_and(|input| !out.fits_in(input)) =>
                {
                    return Err(SpectralError::MalformedGraph(format!(
                        "pooling {i} output {out} must be non-empty and no larger than its input"
                    )));
                }
                _ => {}
            }
            if node.input.is_some_and(Dims::is_empty) {
                return Err(SpectralError::MalformedGraph(format!(
                    "node {i} has an empty input"
                )));
            }
        }
        for (i, pair) in nodes.windows(2).enumerate() {
            if let (Some(out), Some(next)) = (pair[0].output(), pair[1].input) {
                if out != next {
                    return Err(SpectralError::MalformedGraph(format!(
                        "node {i} produces {out} but node {} expects {next}",
                        i + 1
                    )));
                }
            }
        }
        Ok(LayerGraph { nodes })
    }

    /// Chain of layers with shapes propagated from `input`.
    pub fn chain(input: Dims, kinds: impl IntoIterator<Item = LayerKind>) -> Result<Self> {
        let mut dims = input;
        let nodes = kinds
            .into_iter()
            .map(|kind| {
                let node = LayerNode {
                    kind,
                    input: Some(dims),
                };
                dims = kind.output(dims);
                node
            })
            .collect();
        LayerGraph::new(nodes)
    }

    /// Chain of layers without shape metadata.
    pub fn unshaped(kinds: impl IntoIterator<Item = LayerKind>) -> Result<Self> {
        LayerGraph::new(
            kinds
                .into_iter()
                .map(|kind| LayerNode { kind, input: None })
                .collect(),
        )
    }

    pub fn nodes(&self) -> &[LayerNode] {
        &self.nodes
    }

    pub fn convolution_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, LayerKind::Convolution { .. }))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PlannedOp {
    Layer(LayerNode),
    ForwardTransform,
    InverseTransform,
}

/// Where a planned node executes. Spectral nodes carry the padded grid they
/// operate on, when shapes are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum Domain {
    Spatial,
    Spectral { pad: Option<Dims> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedNode {
    pub op: PlannedOp,
    pub domain: Domain,
}

impl PlannedNode {
    pub fn label(&self) -> &'static str {
        match &self.op {
            PlannedOp::Layer(node) => node.kind.label(),
            PlannedOp::ForwardTransform => "F",
            PlannedOp::InverseTransform => "F^-1",
        }
    }

    pub fn is_transform(&self) -> bool {
        !matches!(self.op, PlannedOp::Layer(_))
    }

    pub fn pad(&self) -> Option<Dims> {
        match self.domain {
            Domain::Spectral { pad } => pad,
            Domain::Spatial => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedGraph {
    pub mode: PlanMode,
    pub nodes: Vec<PlannedNode>,
}

impl PlannedGraph {
    /// Checks that transforms pair up, never nest, and that every layer's
    /// domain agrees with whether it sits inside a pair.
    pub fn validate(&self) -> Result<()> {
        let mut open = false;
        for (i, node) in self.nodes.iter().enumerate() {
            let in_spectral = matches!(node.domain, Domain::Spectral { .. });
            match node.op {
                PlannedOp::ForwardTransform if open => {
                    return Err(SpectralError::MalformedGraph(format!(
                        "nested forward transform at {i}"
                    )))
                }
                PlannedOp::ForwardTransform => open = true,
                PlannedOp::InverseTransform if !open => {
                    return Err(SpectralError::MalformedGraph(format!(
                        "unpaired inverse transform at {i}"
                    )))
                }
                PlannedOp::InverseTransform => open = false,
                PlannedOp::Layer(_) if in_spectral != open => {
                    return Err(SpectralError::MalformedGraph(format!(
                        "node {i} is marked {} but sits {} a transform pair",
                        if in_spectral { "spectral" } else { "spatial" },
                        if open { "inside" } else { "outside" }
                    )))
                }
                PlannedOp::Layer(_) => {}
            }
            if node.is_transform() && !in_spectral {
                return Err(SpectralError::MalformedGraph(format!(
                    "transform {i} has no spectral grid"
                )));
            }
        }
        if open {
            return Err(SpectralError::MalformedGraph(
                "spectral region is never closed".into(),
            ));
        }
        if self.mode == PlanMode::Naive && self.nodes.iter().any(PlannedNode::is_transform) {
            return Err(SpectralError::MalformedGraph(
                "naive plan contains transforms".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for PlannedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.nodes.iter().map(PlannedNode::label).collect();
        f.write_str(&labels.join(" "))
    }
}

/// Tracks the padded grid through a spectral run, mirroring what the
/// executor does: pad once for everything up to the first pooling, then
/// resample only when a later convolution outgrows the grid.
fn region_pads(region: &[LayerNode]) -> (Option<Dims>, Vec<Option<Dims>>, Option<Dims>) {
    let Some(mut source) = region[0].input else {
        return (None, vec![None; region.len()], None);
    };
    let mut pad = source;
    let mut probe = source;
    for node in region {
        match node.kind {
            LayerKind::Pooling { .. } => break,
            kind => {
                probe = kind.output(probe);
                pad = pad.max(probe);
            }
        }
    }
    let opening = pad;
    let mut per_node = Vec::with_capacity(region.len());
    for node in region {
        match node.kind {
            LayerKind::Convolution { kernel, .. } => {
                source = source.full_conv(kernel);
                pad = pad.max(source);
                per_node.push(Some(pad));
            }
            LayerKind::Pooling { out } => {
                per_node.push(Some(pad));
                pad = out;
                source = out;
            }
            _ => per_node.push(Some(pad)),
        }
    }
    (Some(opening), per_node, Some(pad))
}

fn push_region(out: &mut Vec<PlannedNode>, region: &[LayerNode]) {
    let (opening, per_node, closing) = region_pads(region);
    out.push(PlannedNode {
        op: PlannedOp::ForwardTransform,
        domain: Domain::Spectral { pad: opening },
    });
    out.extend(region.iter().zip(per_node).map(|(node, pad)| PlannedNode {
        op: PlannedOp::Layer(*node),
        domain: Domain::Spectral { pad },
    }));
    out.push(PlannedNode {
        op: PlannedOp::InverseTransform,
        domain: Domain::Spectral { pad: closing },
    });
}

fn spatial(node: &LayerNode) -> PlannedNode {
    PlannedNode {
        op: PlannedOp::Layer(*node),
        domain: Domain::Spatial,
    }
}

pub fn place_transforms(graph: &LayerGraph, mode: PlanMode) -> Result<PlannedGraph> {
    let nodes = graph.nodes();
    let mut out = Vec::with_capacity(nodes.len() * 2);
    match mode {
        PlanMode::Naive => out.extend(nodes.iter().map(spatial)),
        PlanMode::LegacySpectral => {
            for node in nodes {
                if matches!(node.kind, LayerKind::Convolution { .. }) {
                    push_region(&mut out, std::slice::from_ref(node));
                } else {
                    out.push(spatial(node));
                }
            }
        }
        PlanMode::FusedSpectral => {
            let mut start = 0;
            while start < nodes.len() {
                if !nodes[start].kind.is_spectral() {
                    out.push(spatial(&nodes[start]));
                    start += 1;
                    continue;
                }
                let len = nodes[start..]
                    .iter()
                    .take_while(|n| n.kind.is_spectral())
                    .count();
                push_region(&mut out, &nodes[start..start + len]);
                start += len;
            }
        }
    }
    let plan = PlannedGraph { mode, nodes: out };
    plan.validate()?;
    Ok(plan)
}

pub fn count_transforms(plan: &PlannedGraph) -> usize {
    plan.nodes.iter().filter(|n| n.is_transform()).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexityClass {
    #[serde(rename = "O(n)")]
    Linear,
    #[serde(rename = "O(n log n)")]
    NLogN,
    #[serde(rename = "O(n*k)")]
    NK,
    #[serde(rename = "O(n^2)")]
    Quadratic,
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexityClass::Linear => "O(n)",
            ComplexityClass::NLogN => "O(n log n)",
            ComplexityClass::NK => "O(n*k)",
            ComplexityClass::Quadratic => "O(n^2)",
        })
    }
}

/// Cost of one planned node under both activation accountings.
///
/// `class`/`flops` charge a mask activation as a pointwise multiply against a
/// precomputed mask; `class_embedded`/`flops_embedded` charge it as the
/// circular convolution it is, evaluated through embedded transforms. The two
/// only differ on spectral activation nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCost {
    pub label: String,
    pub n: usize,
    pub class: ComplexityClass,
    pub flops: f64,
    pub class_embedded: ComplexityClass,
    pub flops_embedded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub mode: PlanMode,
    pub transform_count: usize,
    pub nodes: Vec<NodeCost>,
    pub estimated_flops: f64,
    pub estimated_flops_embedded: f64,
    pub notes: Vec<String>,
}

fn n_log_n(n: usize) -> f64 {
    let n = n as f64;
    n * n.log2()
}

pub fn cost_estimate(plan: &PlannedGraph) -> Result<CostReport> {
    use ComplexityClass::*;

    let mut nodes = Vec::with_capacity(plan.nodes.len());
    let mut has_spectral_activation = false;
    for (index, node) in plan.nodes.iter().enumerate() {
        let missing = || SpectralError::MissingShape {
            index,
            label: node.label().to_string(),
        };
        let (n, class, flops, embedded) = match (node.op, node.domain) {
            (PlannedOp::ForwardTransform | PlannedOp::InverseTransform, domain) => {
                let n = match domain {
                    Domain::Spectral { pad } => pad.ok_or_else(missing)?.len(),
                    Domain::Spatial => return Err(missing()),
                };
                (n, NLogN, TRANSFORM_COST * n_log_n(n), None)
            }
            (PlannedOp::Layer(layer), Domain::Spectral { pad }) => {
                let n = pad.ok_or_else(missing)?.len();
                let linear = SPECTRAL_POINT_COST * n as f64;
                match layer.kind {
                    LayerKind::Convolution { channels, .. } => {
                        (n, Linear, linear * channels as f64, None)
                    }
                    LayerKind::Activation {
                        mode: ActivationMode::None,
                    } => (n, Linear, 0.0, None),
                    LayerKind::Activation { .. } => {
                        has_spectral_activation = true;
                        (
                            n,
                            Linear,
                            linear,
                            Some((NLogN, EMBEDDED_ACTIVATION_COST * n_log_n(n))),
                        )
                    }
                    LayerKind::Pooling { .. } => (n, Linear, linear, None),
                    LayerKind::Boundary => (n, Linear, 0.0, None),
                }
            }
            (PlannedOp::Layer(layer), Domain::Spatial) => {
                let n = layer.input.ok_or_else(missing)?.len();
                match layer.kind {
                    LayerKind::Convolution { kernel, channels } => (
                        n,
                        NK,
                        DIRECT_COST * (n * kernel.len() * channels) as f64,
                        None,
                    ),
                    LayerKind::Activation {
                        mode: ActivationMode::None,
                    } => (n, Linear, 0.0, None),
                    LayerKind::Activation { .. } => {
                        (n, Linear, SPECTRAL_POINT_COST * n as f64, None)
                    }
                    LayerKind::Pooling { .. } => {
                        (n, Quadratic, DIRECT_COST * (n as f64) * (n as f64), None)
                    }
                    LayerKind::Boundary => (n, Linear, 0.0, None),
                }
            }
        };
        let (class_embedded, flops_embedded) = embedded.unwrap_or((class, flops));
        nodes.push(NodeCost {
            label: node.label().to_string(),
            n,
            class,
            flops,
            class_embedded,
            flops_embedded,
        });
    }

    let mut notes = Vec::new();
    if has_spectral_activation {
        notes.push(
            "spectral mask activation is a circular convolution of spectra: O(n) only with the mask applied \
             through a precomputed pointwise equivalent, O(n log n) through embedded transforms, O(n^2) done directly"
                .to_string(),
        );
    }
    if plan.nodes.iter().any(|n| {
        matches!(
            n.op,
            PlannedOp::Layer(LayerNode {
                kind: LayerKind::Boundary,
                ..
            })
        )
    }) {
        notes.push("boundary nodes are not costed".to_string());
    }

    Ok(CostReport {
        mode: plan.mode,
        transform_count: count_transforms(plan),
        estimated_flops: nodes.iter().map(|c| c.flops).sum(),
        estimated_flops_embedded: nodes.iter().map(|c| c.flops_embedded).sum(),
        nodes,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cac_chain() -> Vec<LayerKind> {
        vec![
            LayerKind::conv(3, 3),
            LayerKind::activation(),
            LayerKind::conv(3, 3),
            LayerKind::activation(),
        ]
    }

    #[test]
    fn fused_chain_has_two_transforms() {
        let g = LayerGraph::unshaped(cac_chain()).unwrap();
        let plan = place_transforms(&g, PlanMode::FusedSpectral).unwrap();
        assert_eq!(plan.to_string(), "F C A C A F^-1");
        assert_eq!(count_transforms(&plan), 2);
    }

    #[test]
    fn legacy_chain_wraps_each_convolution() {
        let g = LayerGraph::unshaped(cac_chain()).unwrap();
        let plan = place_transforms(&g, PlanMode::LegacySpectral).unwrap();
        assert_eq!(plan.to_string(), "F C F^-1 A F C F^-1 A");
        assert_eq!(count_transforms(&plan), 4);
    }

    #[test]
    fn degenerate_and_naive_plans() {
        let g = LayerGraph::unshaped([LayerKind::activation()]).unwrap();
        assert_eq!(
            place_transforms(&g, PlanMode::FusedSpectral)
                .unwrap()
                .to_string(),
            "F A F^-1"
        );
        let g = LayerGraph::unshaped(cac_chain()).unwrap();
        assert_eq!(
            count_transforms(&place_transforms(&g, PlanMode::Naive).unwrap()),
            0
        );
    }

    #[test]
    fn boundary_splits_regions() {
        let mut kinds = vec![
            LayerKind::conv(3, 3),
            LayerKind::activation(),
            LayerKind::Boundary,
        ];
        kinds.extend([LayerKind::conv(3, 3), LayerKind::activation()]);
        let plan = place_transforms(
            &LayerGraph::unshaped(kinds).unwrap(),
            PlanMode::FusedSpectral,
        )
        .unwrap();
        assert_eq!(plan.to_string(), "F C A F^-1 B F C A F^-1");
        assert_eq!(count_transforms(&plan), 4);
    }

    #[test]
    fn relu_activation_stays_spatial_when_fused() {
        let relu = LayerKind::Activation {
            mode: ActivationMode::TrueReluRoundtrip,
        };
        let kinds = [LayerKind::conv(3, 3), relu, LayerKind::conv(3, 3), relu];
        let plan = place_transforms(
            &LayerGraph::unshaped(kinds).unwrap(),
            PlanMode::FusedSpectral,
        )
        .unwrap();
        assert_eq!(plan.to_string(), "F C F^-1 A F C F^-1 A");
    }

    #[test]
    fn region_padding_tracks_support_and_pooling() {
        let kinds = [
            LayerKind::conv(3, 3),
            LayerKind::activation(),
            LayerKind::conv(5, 5),
            LayerKind::pool(6, 6),
            LayerKind::conv(3, 3),
        ];
        let g = LayerGraph::chain(Dims::new(8, 8), kinds).unwrap();
        let plan = place_transforms(&g, PlanMode::FusedSpectral).unwrap();
        let pads: Vec<Option<Dims>> = plan.nodes.iter().map(PlannedNode::pad).collect();
        let d = |n| Some(Dims::new(n, n));
        // 8 -> 10 -> 10 -> 14 -> pool 6 -> 8
        assert_eq!(pads, vec![d(14), d(14), d(14), d(14), d(14), d(8), d(8)]);
    }

    #[test]
    fn malformed_graphs_are_rejected() {
        assert!(LayerGraph::unshaped([]).is_err());
        assert!(LayerGraph::unshaped([LayerKind::conv(0, 3)]).is_err());
        assert!(LayerGraph::chain(Dims::new(4, 4), [LayerKind::pool(5, 1)]).is_err());
        let nodes = vec![
            LayerNode {
                kind: LayerKind::conv(3, 3),
                input: Some(Dims::new(4, 4)),
            },
            LayerNode {
                kind: LayerKind::activation(),
                input: Some(Dims::new(4, 4)),
            },
        ];
        assert!(matches!(
            LayerGraph::new(nodes),
            Err(SpectralError::MalformedGraph(_))
        ));
        assert!(matches!(
            "spectral".parse::<PlanMode>(),
            Err(SpectralError::Config(_))
        ));
    }

    #[test]
    fn validate_catches_broken_pairing() {
        let node = LayerNode {
            kind: LayerKind::activation(),
            input: None,
        };
        let spectral = Domain::Spectral { pad: None };
        let broken = PlannedGraph {
            mode: PlanMode::FusedSpectral,
            nodes: vec![
                PlannedNode {
                    op: PlannedOp::ForwardTransform,
                    domain: spectral,
                },
                PlannedNode {
                    op: PlannedOp::ForwardTransform,
                    domain: spectral,
                },
                PlannedNode {
                    op: PlannedOp::Layer(node),
                    domain: spectral,
                },
                PlannedNode {
                    op: PlannedOp::InverseTransform,
                    domain: spectral,
                },
            ],
        };
        assert!(broken.validate().is_err());
        let unclosed = PlannedGraph {
            mode: PlanMode::FusedSpectral,
            nodes: vec![PlannedNode {
                op: PlannedOp::ForwardTransform,
                domain: spectral,
            }],
        };
        assert!(unclosed.validate().is_err());
    }

    #[test]
    fn naive_single_conv_cost() {
        let g = LayerGraph::chain(Dims::new(32, 32), [LayerKind::conv(3, 3)]).unwrap();
        let report = cost_estimate(&place_transforms(&g, PlanMode::Naive).unwrap()).unwrap();
        assert_eq!(report.nodes[0].class, ComplexityClass::NK);
        assert_eq!(report.estimated_flops, DIRECT_COST * 9216.0);
        assert_eq!(report.transform_count, 0);
    }

    #[test]
    fn fused_classes_follow_the_diagram() {
        let g = LayerGraph::chain(
            Dims::new(32, 32),
            [LayerKind::conv(1, 1), LayerKind::activation()],
        )
        .unwrap();
        let report =
            cost_estimate(&place_transforms(&g, PlanMode::FusedSpectral).unwrap()).unwrap();
        let classes: Vec<ComplexityClass> = report.nodes.iter().map(|c| c.class).collect();
        use ComplexityClass::*;
        assert_eq!(classes, vec![NLogN, Linear, Linear, NLogN]);
        assert_eq!(report.nodes[0].n, 1024);
        assert_eq!(report.nodes[2].class_embedded, NLogN);
        assert!(!report.notes.is_empty());
    }

    #[test]
    fn fused_is_cheaper_than_legacy_at_4096() {
        let g = LayerGraph::chain(Dims::new(64, 64), cac_chain()).unwrap();
        let fused = cost_estimate(&place_transforms(&g, PlanMode::FusedSpectral).unwrap()).unwrap();
        let legacy =
            cost_estimate(&place_transforms(&g, PlanMode::LegacySpectral).unwrap()).unwrap();
        assert!(fused.estimated_flops < legacy.estimated_flops);
    }

    #[test]
    fn cost_needs_shapes() {
        let g = LayerGraph::unshaped(cac_chain()).unwrap();
        let plan = place_transforms(&g, PlanMode::FusedSpectral).unwrap();
        assert!(matches!(
            cost_estimate(&plan),
            Err(SpectralError::MissingShape { index: 0, .. })
        ));
    }
}
