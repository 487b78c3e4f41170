//! Forward and inverse 2D discrete Fourier transforms.
//!
//! One implementation serves as both the Fourier and the discrete Laplace
//! (Z transform on the unit circle) operator. The forward transform is
//! unnormalized and the inverse is scaled by `1/(P*Q)`, so the convolution
//! theorem holds without extra factors.
//!
//! Maps are zero-extended to the requested padding before transforming; the
//! caller chooses the padding. Linear convolution of an `H x W` image with an
//! `N x M` kernel needs at least `(H+N-1) x (W+M-1)`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::maps::{ComplexGrid, Dims, SpatialMap, SpectralMap};

/// Largest imaginary part tolerated by [`inverse_transform`], relative to
/// `max(1, max |real part|)` of the result.
pub const INVERSE_RESIDUE_TOLERANCE: f64 = 1e-9;

/// Plans are immutable once built; the planner itself sits behind a mutex.
struct PlanCache {
    planner: Mutex<FftPlanner<f64>>,
}

impl PlanCache {
    fn plan(&self, len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
        let mut planner = self.planner.lock().unwrap_or_else(|e| e.into_inner());
        planner.plan_fft(len, direction)
    }
}

static SHARED_PLANS: LazyLock<PlanCache> = LazyLock::new(|| PlanCache {
    planner: Mutex::new(FftPlanner::new()),
});

static GLOBAL_ENGINE: LazyLock<TransformEngine> = LazyLock::new(TransformEngine::new);

/// Unnormalized in-place 2D FFT over a row-major grid.
pub(crate) fn fft2_in_place(data: &mut [Complex64], dims: Dims, direction: FftDirection) {
    debug_assert_eq!(data.len(), dims.len());
    let Dims { height, width } = dims;
    if width > 1 {
        // rustfft runs one transform per `width`-sized chunk.
        SHARED_PLANS.plan(width, direction).process(data);
    }
    if height > 1 {
        let mut transposed = vec![Complex64::new(0.0, 0.0); data.len()];
        for r in 0..height {
            for c in 0..width {
                transposed[c * height + r] = data[r * width + c];
            }
        }
        SHARED_PLANS
            .plan(height, direction)
            .process(&mut transposed);
        for c in 0..width {
            for r in 0..height {
                data[r * width + c] = transposed[c * height + r];
            }
        }
    }
}

/// Inverse 2D FFT including the `1/(P*Q)` factor.
pub(crate) fn ifft2_normalized(data: &mut [Complex64], dims: Dims) {
    fft2_in_place(data, dims, FftDirection::Inverse);
    let scale = 1.0 / dims.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Number of transforms an engine has executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformCounts {
    pub forward: usize,
    pub inverse: usize,
}

impl TransformCounts {
    pub fn total(self) -> usize {
        self.forward + self.inverse
    }
}

/// Transform entry point with per-instance counters.
///
/// All engines share one process-wide plan cache, so creating an engine per
/// pipeline run is cheap and gives that run its own transform tally.
pub struct TransformEngine {
    forward: AtomicUsize,
    inverse: AtomicUsize,
}

impl Default for TransformEngine {
    fn default() -> Self {
        TransformEngine::new()
    }
}

impl std::fmt::Debug for TransformEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformEngine")
            .field("counts", &self.counts())
            .finish()
    }
}

impl TransformEngine {
    pub fn new() -> Self {
        TransformEngine {
            forward: AtomicUsize::new(0),
            inverse: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> TransformCounts {
        TransformCounts {
            forward: self.forward.load(Ordering::Relaxed),
            inverse: self.inverse.load(Ordering::Relaxed),
        }
    }

    /// Zero-extends `map` to `pad` and returns its DFT.
    pub fn forward(&self, map: &SpatialMap, pad: Dims) -> Result<SpectralMap> {
        if pad.is_empty() || !map.dims().fits_in(pad) {
            return Err(SpectralError::dims(format!(
                "padding {pad} is smaller than the {} source map",
                map.dims()
            )));
        }
        if let Some((index, &value)) = map
            .samples()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(SpectralError::NonFinite { index, value });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); pad.len()];
        for (r, row) in map.rows().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                data[r * pad.width + c] = Complex64::new(v, 0.0);
            }
        }
        fft2_in_place(&mut data, pad, FftDirection::Forward);
        self.forward.fetch_add(1, Ordering::Relaxed);
        Ok(SpectralMap::from_parts(pad, map.dims(), data))
    }

    /// Inverse DFT without discarding the imaginary part.
    pub fn inverse_complex(&self, spectrum: &SpectralMap) -> ComplexGrid {
        let mut data = spectrum.coefficients().to_vec();
        let dims = spectrum.padded();
        ifft2_normalized(&mut data, dims);
        self.inverse.fetch_add(1, Ordering::Relaxed);
        ComplexGrid::new(dims.height, dims.width, data).expect("padded dims are validated")
    }

    /// Inverse DFT to a real map of the padded size.
    ///
    /// Fails with [`SpectralError::Symmetry`] when the imaginary residue
    /// exceeds [`INVERSE_RESIDUE_TOLERANCE`].
    pub fn inverse(&self, spectrum: &SpectralMap) -> Result<SpatialMap> {
        let grid = self.inverse_complex(spectrum);
        let (residue, scale) = grid
            .values()
            .iter()
            .fold((0.0f64, 1.0f64), |(res, scale), c| {
                (res.max(c.im.abs()), scale.max(c.re.abs()))
            });
        let relative = residue / scale;
        if relative > INVERSE_RESIDUE_TOLERANCE {
            return Err(SpectralError::Symmetry {
                residue: relative,
                tolerance: INVERSE_RESIDUE_TOLERANCE,
            });
        }
        let samples = grid.values().iter().map(|c| c.re).collect();
        SpatialMap::new(grid.dims().height, grid.dims().width, samples)
    }
}

/// Forward transform of `map` zero-extended to `pad_height x pad_width`.
pub fn forward_transform(
    map: &SpatialMap,
    pad_height: usize,
    pad_width: usize,
) -> Result<SpectralMap> {
    GLOBAL_ENGINE.forward(map, Dims::new(pad_height, pad_width))
}

/// Real inverse transform over the full padded grid.
pub fn inverse_transform(spectrum: &SpectralMap) -> Result<SpatialMap> {
    GLOBAL_ENGINE.inverse(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_dft2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_point_is_identity() {
        let m = SpatialMap::from_rows(&[[5.0]]).unwrap();
        let s = forward_transform(&m, 1, 1).unwrap();
        assert_eq!(s.coefficients(), &[c(5.0)]);
        assert_eq!(inverse_transform(&s).unwrap().samples(), &[5.0]);
    }

    #[test]
    fn constant_map_has_only_dc() {
        let m = SpatialMap::filled(2, 2, 1.0).unwrap();
        let s = forward_transform(&m, 2, 2).unwrap();
        assert_eq!(s.get(0, 0), c(4.0));
        for &k in &s.coefficients()[1..] {
            assert!(k.norm() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_matches_naive_dft() {
        let m = SpatialMap::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let oracle = naive_dft2(&ComplexGrid::from_real(&m));
        // frozen from the naive summation
        let expected = [c(10.0), c(-2.0), c(-4.0), c(0.0)];
        for (o, e) in oracle.values().iter().zip(&expected) {
            assert!((o - e).norm() < 1e-12);
        }
        let s = forward_transform(&m, 2, 2).unwrap();
        for (k, e) in s.coefficients().iter().zip(&expected) {
            assert!((k - e).norm() < 1e-12, "{k} vs {e}");
        }
        assert_eq!(s.source(), Dims::new(2, 2));
    }

    #[test]
    fn inverse_of_known_spectrum() {
        let s = SpectralMap::new(
            Dims::new(2, 2),
            Dims::new(2, 2),
            vec![c(10.0), c(-2.0), c(-4.0), c(0.0)],
        )
        .unwrap();
        let m = inverse_transform(&s).unwrap();
        for (a, b) in m.samples().iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let s = SpectralMap::zeros(Dims::new(3, 5), Dims::new(2, 2)).unwrap();
        let m = inverse_transform(&s).unwrap();
        assert_eq!(m.dims(), Dims::new(3, 5));
        assert!(m.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn padding_smaller_than_source_is_rejected() {
        let m = SpatialMap::zeros(3, 3).unwrap();
        assert!(matches!(
            forward_transform(&m, 2, 3),
            Err(SpectralError::Dimension(_))
        ));
    }

    #[test]
    fn asymmetric_spectrum_is_rejected() {
        let mut coeffs = vec![c(0.0); 4];
        coeffs[1] = Complex64::new(0.0, 1.0);
        let s = SpectralMap::new(Dims::new(1, 4), Dims::new(1, 4), coeffs).unwrap();
        assert!(matches!(
            inverse_transform(&s),
            Err(SpectralError::Symmetry { .. })
        ));
    }

    #[test]
    fn engines_count_independently() {
        let a = TransformEngine::new();
        let b = TransformEngine::new();
        let m = SpatialMap::filled(3, 3, 1.0).unwrap();
        let s = a.forward(&m, Dims::new(4, 4)).unwrap();
        a.inverse(&s).unwrap();
        b.forward(&m, Dims::new(3, 3)).unwrap();
        assert_eq!(
            a.counts(),
            TransformCounts {
                forward: 1,
                inverse: 1
            }
        );
        assert_eq!(
            b.counts(),
            TransformCounts {
                forward: 1,
                inverse: 0
            }
        );
    }
}
