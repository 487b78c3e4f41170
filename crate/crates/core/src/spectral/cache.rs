use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::Result;
use crate::maps::{Dims, SpatialMap, SpectralMap};
use crate::transforms::{TransformCounts, TransformEngine};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct KernelKey {
    dims: Dims,
    pad: Dims,
    bits: Vec<u64>,
}

impl KernelKey {
    fn new(kernel: &SpatialMap, pad: Dims) -> Self {
        KernelKey {
            dims: kernel.dims(),
            pad,
            bits: kernel.samples().iter().map(|v| v.to_bits()).collect(),
        }
    }
}

/// Precomputed kernel spectra keyed on kernel contents and padded size.
///
/// Kernel transforms run on the cache's own [`TransformEngine`], so they never
/// show up in a pipeline's transform count. Lookups and inserts are safe from
/// multiple threads; a racing insert keeps whichever spectrum landed first,
/// and both are bitwise identical.
#[derive(Debug, Default)]
pub struct KernelSpectrumCache {
    engine: TransformEngine,
    entries: RwLock<HashMap<KernelKey, Arc<SpectralMap>>>,
}

static GLOBAL_CACHE: LazyLock<KernelSpectrumCache> = LazyLock::new(KernelSpectrumCache::new);

impl KernelSpectrumCache {
    pub fn new() -> Self {
        KernelSpectrumCache::default()
    }

    /// Process-wide cache used by [`super::run_spectral_block`].
    pub fn global() -> &'static KernelSpectrumCache {
        &GLOBAL_CACHE
    }

    pub fn spectrum(&self, kernel: &SpatialMap, pad: Dims) -> Result<Arc<SpectralMap>> {
        let key = KernelKey::new(kernel, pad);
        if let Some(hit) = self
            .entries
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(Arc::clone(hit));
        }
        let spectrum = Arc::new(self.engine.forward(kernel, pad)?);
        let mut entries = self.entries.write().unwrap_or_else(|e| e.into_inner());
        Ok(Arc::clone(entries.entry(key).or_insert(spectrum)))
    }

    /// Transforms spent filling the cache so far.
    pub fn transforms(&self) -> TransformCounts {
        self.engine.counts()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
