use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{multichannel_spectral_conv, spectral_activation, spectral_conv, KernelSpectrumCache};
use crate::error::{Result, SpectralError};
use crate::maps::{Dims, SpatialMap, SpectralMap};
use crate::oracle::{relu_pointwise, SupportBox};
use crate::transforms::TransformEngine;

/// Weights of one multichannel convolution; every kernel has the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    kernels: Vec<SpatialMap>,
}

impl KernelSet {
    pub fn new(kernels: Vec<SpatialMap>) -> Result<Self> {
        let first = kernels.first().ok_or(SpectralError::EmptyKernelSet)?;
        if let Some(bad) = kernels.iter().find(|k| k.dims() != first.dims()) {
            return Err(SpectralError::dims(format!(
                "kernel set mixes {} and {} kernels",
                first.dims(),
                bad.dims()
            )));
        }
        Ok(KernelSet { kernels })
    }

    pub fn single(kernel: SpatialMap) -> Self {
        KernelSet {
            kernels: vec![kernel],
        }
    }

    pub fn channel_count(&self) -> usize {
        self.kernels.len()
    }

    pub fn dims(&self) -> Dims {
        self.kernels[0].dims()
    }

    pub fn kernels(&self) -> &[SpatialMap] {
        &self.kernels
    }
}

/// How the activation after a convolution is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationMode {
    /// Multiply by the support-box indicator, in the frequency domain.
    PaperMask,
    /// Leave the spectrum, apply `max(0, x)` spatially, transform back.
    TrueReluRoundtrip,
    None,
}

/// Where the activation sits relative to the channel sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccumulationMode {
    /// Sum every channel product, then activate once.
    SumThenActivate,
    /// Activate each channel product inside the loop, then sum.
    AsWritten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadPolicy {
    /// Pad exactly to the convolution support.
    Support,
    /// Pad to a fixed size, which must contain the support.
    Fixed(Dims),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralBlockConfig {
    pub activation: ActivationMode,
    pub accumulation: AccumulationMode,
    pub pad: PadPolicy,
}

impl Default for SpectralBlockConfig {
    fn default() -> Self {
        SpectralBlockConfig {
            activation: ActivationMode::PaperMask,
            accumulation: AccumulationMode::SumThenActivate,
            pad: PadPolicy::Support,
        }
    }
}

impl SpectralBlockConfig {
    pub fn with_activation(activation: ActivationMode) -> Self {
        SpectralBlockConfig {
            activation,
            ..Default::default()
        }
    }
}

macro_rules! string_enum {
    ($ty:ident { $($variant:ident => $name:literal $(| $alias:literal)*),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = SpectralError;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name $(| $alias)* => Ok($ty::$variant),)+
                    other => Err(SpectralError::Config(format!(
                        concat!("unknown ", stringify!($ty), " '{}'"),
                        other
                    ))),
                }
            }
        }
    };
}

string_enum!(ActivationMode {
    PaperMask => "paper_mask",
    TrueReluRoundtrip => "true_relu_roundtrip" | "relu",
    None => "none",
});

string_enum!(AccumulationMode {
    SumThenActivate => "sum_then_activate",
    AsWritten => "as_written",
});

/// Runs one convolution-plus-activation block with the process-wide kernel
/// cache and a fresh transform engine.
pub fn run_spectral_block(
    image: &SpatialMap,
    kernels: &KernelSet,
    config: SpectralBlockConfig,
) -> Result<SpatialMap> {
    run_spectral_block_with(
        &TransformEngine::new(),
        KernelSpectrumCache::global(),
        image,
        kernels,
        config,
    )
}

/// Transform once, convolve every channel, activate, transform back once.
///
/// Image transforms go through `engine`, kernel transforms through `cache`.
/// With `PaperMask` or `None` activation the engine records exactly one
/// forward and one inverse transform whatever the channel count;
/// `TrueReluRoundtrip` adds a round trip per activation.
///
/// Returns the `(H+N-1) x (W+M-1)` support window of the result.
pub fn run_spectral_block_with(
    engine: &TransformEngine,
    cache: &KernelSpectrumCache,
    image: &SpatialMap,
    kernels: &KernelSet,
    config: SpectralBlockConfig,
) -> Result<SpatialMap> {
    let support = image.dims().full_conv(kernels.dims());
    let pad = match config.pad {
        PadPolicy::Support => support,
        PadPolicy::Fixed(pad) if support.fits_in(pad) => pad,
        PadPolicy::Fixed(pad) => {
            return Err(SpectralError::dims(format!(
                "fixed padding {pad} cannot hold the {support} convolution support"
            )))
        }
    };
    let support_box = SupportBox::from(support);

    let image_spec = engine.forward(image, pad)?;
    let kernel_specs = kernels
        .kernels()
        .iter()
        .map(|k| cache.spectrum(k, pad))
        .collect::<Result<Vec<_>>>()?;

    let activate = |spec: SpectralMap| -> Result<SpectralMap> {
        match config.activation {
            ActivationMode::PaperMask => spectral_activation(&spec, support_box),
            ActivationMode::None => Ok(spec),
            ActivationMode::TrueReluRoundtrip => {
                let spatial = engine.inverse(&spec)?.crop(support)?;
                engine.forward(&relu_pointwise(&spatial), pad)
            }
        }
    };

    let activated = match config.accumulation {
        AccumulationMode::SumThenActivate => {
            let refs: Vec<&SpectralMap> = kernel_specs.iter().map(|k| k.as_ref()).collect();
            activate(multichannel_spectral_conv(&image_spec, &refs)?)?
        }
        AccumulationMode::AsWritten => {
            let mut acc: Option<SpectralMap> = None;
            for kernel_spec in &kernel_specs {
                let channel = activate(spectral_conv(&image_spec, kernel_spec)?)?;
                acc = Some(match acc {
                    None => channel,
                    Some(prev) => {
                        let summed = prev
                            .coefficients()
                            .iter()
                            .zip(channel.coefficients())
                            .map(|(a, b)| a + b)
                            .collect();
                        SpectralMap::new(pad, support, summed)?
                    }
                });
            }
            acc.expect("kernel set is non-empty")
        }
    };

    engine.inverse(&activated)?.crop(support)
}
