use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::maps::{Dims, SpectralMap};

/// Signed frequencies `[-floor(n/2), n - 1 - floor(n/2)]`, i.e. the block left
/// after shifting DC to the centre and cropping `n` bins.
fn kept_frequencies(n: usize) -> std::ops::Range<isize> {
    let low = -((n / 2) as isize);
    low..low + n as isize
}

fn wrap(f: isize, len: usize) -> usize {
    f.rem_euclid(len as isize) as usize
}

/// Spectral pooling: keeps the centred `out_height x out_width` low-frequency
/// block of the spectrum.
///
/// Coefficients are rescaled by `out/padded` so sample values keep their
/// magnitude (a 1x1 result inverts to the mean). The cropped block is then
/// projected onto conjugate-symmetric spectra, which only changes the
/// unpaired Nyquist row/column of even output sizes, so the inverse is real.
pub fn spectral_pool(
    spec: &SpectralMap,
    out_height: usize,
    out_width: usize,
) -> Result<SpectralMap> {
    let out = Dims::new(out_height, out_width);
    let padded = spec.padded();
    if out.is_empty() || !out.fits_in(padded) {
        return Err(SpectralError::dims(format!(
            "cannot pool a {padded} spectrum to {out}"
        )));
    }
    if out == padded {
        return Ok(spec.clone());
    }
    let scale = out.len() as f64 / padded.len() as f64;
    let mut cropped = vec![Complex64::new(0.0, 0.0); out.len()];
    for fu in kept_frequencies(out_height) {
        for fv in kept_frequencies(out_width) {
            let c = spec.get(wrap(fu, padded.height), wrap(fv, padded.width));
            cropped[wrap(fu, out_height) * out_width + wrap(fv, out_width)] = c * scale;
        }
    }
    let symmetric = (0..out_height)
        .flat_map(|u| (0..out_width).map(move |v| (u, v)))
        .map(|(u, v)| {
            let mirror =
                cropped[((out_height - u) % out_height) * out_width + (out_width - v) % out_width];
            (cropped[u * out_width + v] + mirror.conj()) * 0.5
        })
        .collect();
    Ok(SpectralMap::from_parts(out, out, symmetric))
}

/// `T(u, k) = (1/P) sum_{x < extent} exp(2 pi i x (k/P - u/R))`: maps a
/// length-`P` spectrum of a signal supported on `[0, extent)` to its
/// length-`R` spectrum.
fn regrid_matrix(extent: usize, from: usize, to: usize) -> Vec<Complex64> {
    let period = from * to;
    let roots: Vec<Complex64> = (0..period)
        .map(|m| Complex64::from_polar(1.0 / from as f64, TAU * m as f64 / period as f64))
        .collect();
    let mut t = vec![Complex64::new(0.0, 0.0); to * from];
    for u in 0..to {
        for k in 0..from {
            let step = (k * to) as i64 - (u * from) as i64;
            let mut sum = Complex64::new(0.0, 0.0);
            for x in 0..extent as i64 {
                sum += roots[(x * step).rem_euclid(period as i64) as usize];
            }
            t[u * from + k] = sum;
        }
    }
    t
}

/// Re-expresses a spectrum on a different padded grid without leaving the
/// frequency domain.
///
/// Exact for any target that still contains the source window, because the
/// spatial signal is zero outside that window. Costs `O(PQ(P+Q))`; used when
/// a pipeline region must change padding, e.g. around spectral pooling.
pub fn resample_spectrum(spec: &SpectralMap, target: Dims) -> Result<SpectralMap> {
    let source = spec.source();
    if target.is_empty() || !source.fits_in(target) {
        return Err(SpectralError::dims(format!(
            "cannot resample a spectrum with source {source} onto a {target} grid"
        )));
    }
    let padded = spec.padded();
    if target == padded {
        return Ok(spec.clone());
    }
    let rows = regrid_matrix(source.height, padded.height, target.height);
    let cols = regrid_matrix(source.width, padded.width, target.width);

    // rows: (target.height x padded.height) * (padded.height x padded.width)
    let mut partial = vec![Complex64::new(0.0, 0.0); target.height * padded.width];
    for u in 0..target.height {
        let out_row = &mut partial[u * padded.width..(u + 1) * padded.width];
        for k in 0..padded.height {
            let t = rows[u * padded.height + k];
            let in_row = &spec.coefficients()[k * padded.width..(k + 1) * padded.width];
            for (o, c) in out_row.iter_mut().zip(in_row) {
                *o += t * c;
            }
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
    for u in 0..target.height {
        let in_row = &partial[u * padded.width..(u + 1) * padded.width];
        for v in 0..target.width {
            let t_row = &cols[v * padded.width..(v + 1) * padded.width];
            out[u * target.width + v] = in_row.iter().zip(t_row).map(|(c, t)| c * t).sum();
        }
    }
    Ok(SpectralMap::from_parts(target, source, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::SpatialMap;
    use crate::metrics::{max_relative_error, max_relative_error_complex};
    use crate::oracle::truncation_lowpass_oracle;
    use crate::transforms::{forward_transform, inverse_transform, TransformEngine};

    fn ramp(h: usize, w: usize) -> SpatialMap {
        SpatialMap::from_fn(h, w, |r, c| (r * w + c) as f64).unwrap()
    }

    #[test]
    fn full_size_is_identity() {
        let s = forward_transform(&ramp(4, 6), 4, 6).unwrap();
        assert_eq!(spectral_pool(&s, 4, 6).unwrap(), s);
    }

    #[test]
    fn dc_only_gives_mean() {
        let m = SpatialMap::from_fn(5, 3, |r, c| ((r * 3 + c) % 4) as f64 - 0.7).unwrap();
        let mean = m.samples().iter().sum::<f64>() / 15.0;
        let pooled = spectral_pool(&forward_transform(&m, 5, 3).unwrap(), 1, 1).unwrap();
        let back = inverse_transform(&pooled).unwrap();
        assert!((back.get(0, 0) - mean).abs() < 1e-12);
    }

    #[test]
    fn ramp_four_to_two_matches_oracle() {
        let m = ramp(4, 4);
        let pooled =
            inverse_transform(&spectral_pool(&forward_transform(&m, 4, 4).unwrap(), 2, 2).unwrap())
                .unwrap();
        let oracle = truncation_lowpass_oracle(&m, 2, 2).unwrap();
        assert!(max_relative_error(pooled.samples(), oracle.samples()) <= 1e-10);
    }

    #[test]
    fn pooled_spectrum_inverts_to_real() {
        let m = SpatialMap::from_fn(7, 6, |r, c| ((r * 5 + c * 3) % 7) as f64 - 3.0).unwrap();
        let s = forward_transform(&m, 7, 6).unwrap();
        for (oh, ow) in [(2, 2), (3, 4), (6, 5), (4, 6)] {
            let p = spectral_pool(&s, oh, ow).unwrap();
            let grid = TransformEngine::new().inverse_complex(&p);
            let scale = grid.values().iter().fold(1.0f64, |m, c| m.max(c.re.abs()));
            let residue = grid.values().iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
            assert!(residue / scale <= 1e-12, "{oh}x{ow}: {residue}");
        }
    }

    #[test]
    fn pool_rejects_growth() {
        let s = forward_transform(&ramp(3, 3), 3, 3).unwrap();
        assert!(spectral_pool(&s, 4, 2).is_err());
        assert!(spectral_pool(&s, 0, 2).is_err());
    }

    #[test]
    fn resample_matches_direct_transform() {
        let m = SpatialMap::from_fn(3, 4, |r, c| (r as f64 + 1.0) * (c as f64 - 1.5)).unwrap();
        let base = forward_transform(&m, 5, 7).unwrap();
        for (th, tw) in [(3, 4), (9, 6), (5, 7), (11, 13)] {
            let got = resample_spectrum(&base, Dims::new(th, tw)).unwrap();
            let want = forward_transform(&m, th, tw).unwrap();
            assert!(
                max_relative_error_complex(got.coefficients(), want.coefficients()) <= 1e-12,
                "{th}x{tw}"
            );
        }
        assert!(resample_spectrum(&base, Dims::new(2, 7)).is_err());
    }
}
