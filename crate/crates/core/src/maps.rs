//! Grid types shared by every stage: real sample maps, complex grids and
//! spectra that remember which spatial window they came from.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};

/// Height and width of a grid, in pixels or frequency bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub height: usize,
    pub width: usize,
}

impl Dims {
    pub const fn new(height: usize, width: usize) -> Self {
        Dims { height, width }
    }

    pub const fn len(self) -> usize {
        self.height * self.width
    }

    pub const fn is_empty(self) -> bool {
        self.height == 0 || self.width == 0
    }

    /// True when `self` fits inside `other` along both axes.
    pub const fn fits_in(self, other: Dims) -> bool {
        self.height <= other.height && self.width <= other.width
    }

    pub fn max(self, other: Dims) -> Dims {
        Dims::new(self.height.max(other.height), self.width.max(other.width))
    }

    /// Support of the full linear convolution of two grids of these sizes.
    pub fn full_conv(self, kernel: Dims) -> Dims {
        Dims::new(
            self.height + kernel.height - 1,
            self.width + kernel.width - 1,
        )
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.height, self.width)
    }
}

fn check_positive(dims: Dims, what: &str) -> Result<()> {
    if dims.is_empty() {
        return Err(SpectralError::dims(format!(
            "{what} must be non-empty, got {dims}"
        )));
    }
    Ok(())
}

/// A finite real-valued 2D grid stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMap {
    dims: Dims,
    samples: Vec<f64>,
}

impl SpatialMap {
    pub fn new(height: usize, width: usize, samples: Vec<f64>) -> Result<Self> {
        let dims = Dims::new(height, width);
        check_positive(dims, "spatial map")?;
        if samples.len() != dims.len() {
            return Err(SpectralError::dims(format!(
                "{dims} map needs {} samples, got {}",
                dims.len(),
                samples.len()
            )));
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SpectralError::NonFinite { index, value });
        }
        Ok(SpatialMap { dims, samples })
    }

    /// Builds a map from nested rows; all rows must share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(SpectralError::dims("ragged rows"));
        }
        let samples = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        SpatialMap::new(height, width, samples)
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        SpatialMap::filled(height, width, 0.0)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        SpatialMap::new(height, width, vec![value; height * width])
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        SpatialMap::new(height, width, samples)
    }

    /// Builds a map without re-validating; callers guarantee the invariants.
    pub(crate) fn from_parts(dims: Dims, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), dims.len());
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        SpatialMap { dims, samples }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.dims.width + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.dims.width)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Top-left `dims` window of the map.
    pub fn crop(&self, dims: Dims) -> Result<SpatialMap> {
        check_positive(dims, "crop window")?;
        if !dims.fits_in(self.dims) {
            return Err(SpectralError::dims(format!(
                "cannot crop {} map to {dims}",
                self.dims
            )));
        }
        let samples = self
            .rows()
            .take(dims.height)
            .flat_map(|row| row[..dims.width].iter().copied())
            .collect();
        Ok(SpatialMap::from_parts(dims, samples))
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Element-wise `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SpatialMap, beta: f64) -> Result<SpatialMap> {
        if self.dims != other.dims {
            return Err(SpectralError::dims(format!(
                "cannot combine {} and {} maps",
                self.dims, other.dims
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        SpatialMap::new(self.dims.height, self.dims.width, samples)
    }
}

/// A complex 2D grid stored row-major, with no provenance attached.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    dims: Dims,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(height: usize, width: usize, values: Vec<Complex64>) -> Result<Self> {
        let dims = Dims::new(height, width);
        check_positive(dims, "complex grid")?;
        if values.len() != dims.len() {
            return Err(SpectralError::dims(format!(
                "{dims} grid needs {} values, got {}",
                dims.len(),
                values.len()
            )));
        }
        Ok(ComplexGrid { dims, values })
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        ComplexGrid::new(
            height,
            width,
            vec![Complex64::new(0.0, 0.0); height * width],
        )
    }

    pub fn from_real(map: &SpatialMap) -> Self {
        ComplexGrid {
            dims: map.dims(),
            values: map
                .samples()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.dims.width + col]
    }
}

/// Frequency-domain grid plus the size of the spatial map it represents.
///
/// `padded` is the transform size; `source` is the window of the padded
/// spatial grid that may hold non-zero samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMap {
    padded: Dims,
    source: Dims,
    coefficients: Vec<Complex64>,
}

impl SpectralMap {
    pub fn new(padded: Dims, source: Dims, coefficients: Vec<Complex64>) -> Result<Self> {
        check_positive(padded, "padded spectrum")?;
        check_positive(source, "spectrum source window")?;
        if !source.fits_in(padded) {
            return Err(SpectralError::dims(format!(
                "source window {source} exceeds padded size {padded}"
            )));
        }
        if coefficients.len() != padded.len() {
            return Err(SpectralError::dims(format!(
                "{padded} spectrum needs {} coefficients, got {}",
                padded.len(),
                coefficients.len()
            )));
        }
        if let Some((index, c)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.re.is_finite() && c.im.is_finite()))
        {
            let value = if c.re.is_finite() { c.im } else { c.re };
            return Err(SpectralError::NonFinite { index, value });
        }
        Ok(SpectralMap {
            padded,
            source,
            coefficients,
        })
    }

    pub(crate) fn from_parts(padded: Dims, source: Dims, coefficients: Vec<Complex64>) -> Self {
        debug_assert_eq!(coefficients.len(), padded.len());
        debug_assert!(source.fits_in(padded));
        SpectralMap {
            padded,
            source,
            coefficients,
        }
    }

    pub fn zeros(padded: Dims, source: Dims) -> Result<Self> {
        SpectralMap::new(padded, source, vec![Complex64::new(0.0, 0.0); padded.len()])
    }

    pub fn padded(&self) -> Dims {
        self.padded
    }

    pub fn source(&self) -> Dims {
        self.source
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.coefficients[u * self.padded.width + v]
    }

    pub fn with_source(mut self, source: Dims) -> Result<Self> {
        if source.is_empty() || !source.fits_in(self.padded) {
            return Err(SpectralError::dims(format!(
                "source window {source} does not fit padded size {}",
                self.padded
            )));
        }
        self.source = source;
        Ok(self)
    }

    pub fn scaled(&self, factor: f64) -> SpectralMap {
        SpectralMap::from_parts(
            self.padded,
            self.source,
            self.coefficients.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn to_grid(&self) -> ComplexGrid {
        ComplexGrid {
            dims: self.padded,
            values: self.coefficients.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|C(u,v) - conj(C(-u,-v))|` over the grid, divided by the
    /// largest coefficient magnitude (or 1 for an all-zero spectrum).
    pub fn conjugate_asymmetry(&self) -> f64 {
        let Dims { height, width } = self.padded;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for u in 0..height {
            for v in 0..width {
                let mirror = self.get((height - u) % height, (width - v) % width);
                worst = worst.max((self.get(u, v) - mirror.conj()).norm());
            }
        }
        if self.max_abs() == 0.0 {
            worst
        } else {
            worst / scale
        }
    }
}
