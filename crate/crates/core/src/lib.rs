//! Frequency-domain convolution networks for inference.
//!
//! The crate transforms a feature map once, runs convolution, a finite-support
//! activation and pooling on its spectrum, and transforms back once. Every
//! spectral operation has a brute-force spatial counterpart in [`oracle`], and
//! [`planner`] decides where forward and inverse transforms go in a chain of
//! layers and what that placement costs.

pub mod error;
pub mod maps;
pub mod metrics;
pub mod oracle;
pub mod planner;
pub mod spectral;
pub mod transforms;

pub use error::{Result, SpectralError};
pub use maps::{ComplexGrid, Dims, SpatialMap, SpectralMap};
pub use transforms::{forward_transform, inverse_transform, TransformCounts, TransformEngine};
