//! Brute-force spatial reference implementations.
//!
//! Nothing here calls into [`crate::transforms`] or [`crate::spectral`]; the
//! loops are quadratic on purpose so that equivalence tests compare two
//! independent computations.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::maps::{ComplexGrid, Dims, SpatialMap};

/// Finite support bounds `(p, q)`: the kept region is rows `0..p`, columns `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportBox {
    p: usize,
    q: usize,
}

impl SupportBox {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(SpectralError::dims(format!(
                "support box {p}x{q} must be at least 1x1"
            )));
        }
        Ok(SupportBox { p, q })
    }

    pub fn p(self) -> usize {
        self.p
    }

    pub fn q(self) -> usize {
        self.q
    }

    pub fn dims(self) -> Dims {
        Dims::new(self.p, self.q)
    }

    pub(crate) fn check_within(self, dims: Dims) -> Result<()> {
        if self.p > dims.height || self.q > dims.width {
            return Err(SpectralError::Bounds {
                p: self.p,
                q: self.q,
                height: dims.height,
                width: dims.width,
            });
        }
        Ok(())
    }
}

impl From<Dims> for SupportBox {
    /// Panics on empty dims; every `Dims` reaching here comes from a validated map.
    fn from(d: Dims) -> Self {
        SupportBox::new(d.height, d.width).expect("non-empty dims")
    }
}

/// Full linear convolution, `(H+N-1) x (W+M-1)`, with zeros outside both inputs.
pub fn direct_conv2(image: &SpatialMap, kernel: &SpatialMap) -> SpatialMap {
    let (h, w) = (image.height(), image.width());
    let (n, m) = (kernel.height(), kernel.width());
    let out = image.dims().full_conv(kernel.dims());
    let mut acc = vec![0.0; out.len()];
    for y in 0..out.height {
        for x in 0..out.width {
            let mut sum = 0.0;
            // image index i, kernel index y - i, both in range
            for i in y.saturating_sub(n - 1)..=y.min(h - 1) {
                for j in x.saturating_sub(m - 1)..=x.min(w - 1) {
                    sum += image.get(i, j) * kernel.get(y - i, x - j);
                }
            }
            acc[y * out.width + x] = sum;
        }
    }
    SpatialMap::from_parts(out, acc)
}

pub fn relu_pointwise(map: &SpatialMap) -> SpatialMap {
    SpatialMap::from_parts(
        map.dims(),
        map.samples().iter().map(|&v| v.max(0.0)).collect(),
    )
}

/// Keeps samples inside the support box and zeroes everything else.
pub fn position_mask(map: &SpatialMap, support: SupportBox) -> Result<SpatialMap> {
    support.check_within(map.dims())?;
    let width = map.width();
    let samples = map
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (r, c) = (i / width, i % width);
            if r < support.p() && c < support.q() {
                v
            } else {
                0.0
            }
        })
        .collect();
    Ok(SpatialMap::from_parts(map.dims(), samples))
}

/// `out(u,v) = sum a(u',v') * b((u-u') mod P, (v-v') mod Q)`.
pub fn circular_conv2(a: &ComplexGrid, b: &ComplexGrid) -> Result<ComplexGrid> {
    if a.dims() != b.dims() {
        return Err(SpectralError::dims(format!(
            "circular convolution of {} and {} grids",
            a.dims(),
            b.dims()
        )));
    }
    let Dims { height, width } = a.dims();
    let mut out = vec![Complex64::new(0.0, 0.0); height * width];
    for u in 0..height {
        for v in 0..width {
            let mut sum = Complex64::new(0.0, 0.0);
            for s in 0..height {
                for t in 0..width {
                    sum += a.get(s, t) * b.get((u + height - s) % height, (v + width - t) % width);
                }
            }
            out[u * width + v] = sum;
        }
    }
    ComplexGrid::new(height, width, out)
}

fn twiddles(len: usize, sign: f64) -> Vec<Complex64> {
    (0..len)
        .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / len as f64))
        .collect()
}

fn naive_dft2_signed(grid: &ComplexGrid, sign: f64) -> ComplexGrid {
    let Dims { height, width } = grid.dims();
    let tw_h = twiddles(height, sign);
    let tw_w = twiddles(width, sign);
    let mut out = vec![Complex64::new(0.0, 0.0); height * width];
    for u in 0..height {
        for v in 0..width {
            let mut sum = Complex64::new(0.0, 0.0);
            for x in 0..height {
                for y in 0..width {
                    sum += grid.get(x, y) * tw_h[(u * x) % height] * tw_w[(v * y) % width];
                }
            }
            out[u * width + v] = sum;
        }
    }
    ComplexGrid::new(height, width, out).expect("same dims as input")
}

/// Direct double-sum DFT, `O((PQ)^2)`, unnormalized.
pub fn naive_dft2(grid: &ComplexGrid) -> ComplexGrid {
    naive_dft2_signed(grid, -1.0)
}

/// Direct double-sum inverse DFT including the `1/(PQ)` factor.
pub fn naive_idft2(grid: &ComplexGrid) -> ComplexGrid {
    let raw = naive_dft2_signed(grid, 1.0);
    let scale = 1.0 / grid.dims().len() as f64;
    let dims = raw.dims();
    ComplexGrid::new(
        dims.height,
        dims.width,
        raw.into_values().into_iter().map(|c| c * scale).collect(),
    )
    .expect("same dims as input")
}

/// Signed frequencies kept by a centered crop to `out` bins, in output order.
fn centered_frequencies(out: usize) -> impl Iterator<Item = isize> {
    let low = -((out / 2) as isize);
    low..low + out as isize
}

/// Low-pass downsampling reference: naive DFT, centered crop, naive inverse,
/// real part.
pub fn truncation_lowpass_oracle(
    map: &SpatialMap,
    out_height: usize,
    out_width: usize,
) -> Result<SpatialMap> {
    let out = Dims::new(out_height, out_width);
    if out.is_empty() || !out.fits_in(map.dims()) {
        return Err(SpectralError::dims(format!(
            "cannot truncate a {} map to {out}",
            map.dims()
        )));
    }
    let Dims { height, width } = map.dims();
    let spectrum = naive_dft2(&ComplexGrid::from_real(map));
    let scale = out.len() as f64 / map.dims().len() as f64;
    let mut cropped = vec![Complex64::new(0.0, 0.0); out.len()];
    for fu in centered_frequencies(out_height) {
        for fv in centered_frequencies(out_width) {
            let src = spectrum.get(
                fu.rem_euclid(height as isize) as usize,
                fv.rem_euclid(width as isize) as usize,
            );
            let ou = fu.rem_euclid(out_height as isize) as usize;
            let ov = fv.rem_euclid(out_width as isize) as usize;
            cropped[ou * out_width + ov] = src * scale;
        }
    }
    let spatial = naive_idft2(&ComplexGrid::new(out_height, out_width, cropped)?);
    SpatialMap::new(
        out_height,
        out_width,
        spatial.values().iter().map(|c| c.re).collect(),
    )
}
