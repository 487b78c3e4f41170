//! Frequency-domain operations: convolution, multichannel accumulation, the
//! finite-support activation and spectral pooling.
//!
//! Spectra are assumed to come from [`crate::transforms`] with a padding large
//! enough for every convolution they take part in; [`spectral_conv`] refuses to
//! produce a result whose support would wrap around the padded grid.
//!
//! The activation multiplies the spatial signal by the indicator of its
//! support box. In the frequency domain that product is a scaled circular
//! convolution of the two spectra ([`l_multiply`]), and the indicator's
//! spectrum is a product of two Dirichlet kernels ([`heaviside_spectrum`]).

mod block;
mod cache;
mod pool;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

pub use block::{
    run_spectral_block, run_spectral_block_with, AccumulationMode, ActivationMode, KernelSet,
    PadPolicy, SpectralBlockConfig,
};
pub use cache::KernelSpectrumCache;
pub use pool::{resample_spectrum, spectral_pool};

use crate::error::{Result, SpectralError};
use crate::maps::{Dims, SpectralMap};
use crate::oracle::SupportBox;
use crate::transforms::{fft2_in_place, ifft2_normalized};

fn same_padding(a: &SpectralMap, b: &SpectralMap, op: &str) -> Result<()> {
    if a.padded() != b.padded() {
        return Err(SpectralError::dims(format!(
            "{op}: padded sizes differ ({} vs {})",
            a.padded(),
            b.padded()
        )));
    }
    Ok(())
}

/// Coefficient-wise product of an image spectrum and a kernel spectrum.
///
/// The result's source window is the full linear-convolution support of the
/// two source windows, which must fit in the padded grid.
pub fn spectral_conv(image_spec: &SpectralMap, kernel_spec: &SpectralMap) -> Result<SpectralMap> {
    same_padding(image_spec, kernel_spec, "spectral_conv")?;
    let support = image_spec.source().full_conv(kernel_spec.source());
    if !support.fits_in(image_spec.padded()) {
        return Err(SpectralError::dims(format!(
            "convolution support {support} exceeds padding {}; the result would wrap around",
            image_spec.padded()
        )));
    }
    let coefficients = image_spec
        .coefficients()
        .iter()
        .zip(kernel_spec.coefficients())
        .map(|(a, b)| a * b)
        .collect();
    Ok(SpectralMap::from_parts(
        image_spec.padded(),
        support,
        coefficients,
    ))
}

/// Sum over channels of [`spectral_conv`], with no inverse transform in between.
///
/// Channel products may be computed in parallel; they are always added in
/// channel order.
pub fn multichannel_spectral_conv(
    image_spec: &SpectralMap,
    kernel_specs: &[&SpectralMap],
) -> Result<SpectralMap> {
    let (first, rest) = kernel_specs
        .split_first()
        .ok_or(SpectralError::EmptyKernelSet)?;
    if let Some(bad) = rest.iter().find(|k| k.source() != first.source()) {
        return Err(SpectralError::dims(format!(
            "kernel spectra disagree on source size ({} vs {})",
            first.source(),
            bad.source()
        )));
    }
    let products = kernel_specs
        .par_iter()
        .map(|k| spectral_conv(image_spec, k))
        .collect::<Result<Vec<_>>>()?;
    let mut products = products.into_iter();
    let head = products.next().expect("at least one kernel");
    let (padded, support) = (head.padded(), head.source());
    let mut acc = head.into_coefficients();
    for product in products {
        for (a, p) in acc.iter_mut().zip(product.coefficients()) {
            *a += p;
        }
    }
    Ok(SpectralMap::from_parts(padded, support, acc))
}

/// Exact support `(H+N-1, W+M-1)` of a full linear convolution.
pub fn support_bounds(
    image_height: usize,
    image_width: usize,
    kernel_height: usize,
    kernel_width: usize,
) -> Result<SupportBox> {
    if [image_height, image_width, kernel_height, kernel_width].contains(&0) {
        return Err(SpectralError::dims("support bounds need positive sizes"));
    }
    SupportBox::new(
        image_height + kernel_height - 1,
        image_width + kernel_width - 1,
    )
}

/// `D(u) = sum_{x < extent} exp(-2 pi i u x / len)` for every `u < len`.
fn dirichlet_profile(extent: usize, len: usize) -> Vec<Complex64> {
    if extent == len {
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        out[0] = Complex64::new(len as f64, 0.0);
        return out;
    }
    let roots: Vec<Complex64> = (0..len)
        .map(|k| Complex64::from_polar(1.0, -TAU * k as f64 / len as f64))
        .collect();
    (0..len)
        .map(|u| (0..extent).map(|x| roots[(u * x) % len]).sum())
        .collect()
}

/// Spectrum of the indicator that is 1 on `[0,p) x [0,q)` and 0 elsewhere in
/// a `pad_height x pad_width` grid.
pub fn heaviside_spectrum(
    support: SupportBox,
    pad_height: usize,
    pad_width: usize,
) -> Result<SpectralMap> {
    let pad = Dims::new(pad_height, pad_width);
    if pad.is_empty() {
        return Err(SpectralError::dims(
            "heaviside spectrum needs a non-empty grid",
        ));
    }
    support.check_within(pad)?;
    let rows = dirichlet_profile(support.p(), pad_height);
    let cols = dirichlet_profile(support.q(), pad_width);
    let coefficients = rows
        .iter()
        .flat_map(|r| cols.iter().map(move |c| r * c))
        .collect();
    Ok(SpectralMap::from_parts(pad, support.dims(), coefficients))
}

/// Spectrum of the pointwise product of the two operands' spatial signals:
/// `(1/(PQ))` times the circular convolution of the coefficient grids.
///
/// Evaluated through the multiplication-convolution duality with embedded
/// transforms, `O(n log n)`. These are internal to the operation and do not
/// move the pipeline out of the frequency domain.
pub fn l_multiply(a_spec: &SpectralMap, b_spec: &SpectralMap) -> Result<SpectralMap> {
    same_padding(a_spec, b_spec, "l_multiply")?;
    let dims = a_spec.padded();
    let mut a = a_spec.coefficients().to_vec();
    let mut b = b_spec.coefficients().to_vec();
    ifft2_normalized(&mut a, dims);
    ifft2_normalized(&mut b, dims);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft2_in_place(&mut a, dims, FftDirection::Forward);
    let source = Dims::new(
        a_spec.source().height.min(b_spec.source().height),
        a_spec.source().width.min(b_spec.source().width),
    );
    Ok(SpectralMap::from_parts(dims, source, a))
}

/// Finite-support activation applied in the frequency domain: multiplies the
/// spatial signal by the indicator of `support`.
pub fn spectral_activation(c_spec: &SpectralMap, support: SupportBox) -> Result<SpectralMap> {
    let padded = c_spec.padded();
    let mask = heaviside_spectrum(support, padded.height, padded.width)?;
    l_multiply(c_spec, &mask)?.with_source(support.dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{ComplexGrid, SpatialMap};
    use crate::metrics::max_relative_error_complex;
    use crate::oracle::{circular_conv2, direct_conv2, naive_dft2, position_mask};
    use crate::transforms::{forward_transform, inverse_transform};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_map(rng: &mut StdRng, h: usize, w: usize) -> SpatialMap {
        SpatialMap::from_fn(h, w, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
    }

    fn max_rel(a: &SpectralMap, b: &SpectralMap) -> f64 {
        max_relative_error_complex(a.coefficients(), b.coefficients())
    }

    #[test]
    fn delta_kernel_spectrum_is_identity() {
        let img = SpatialMap::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let spec = forward_transform(&img, 3, 3).unwrap();
        let delta = forward_transform(&SpatialMap::from_rows(&[[1.0]]).unwrap(), 3, 3).unwrap();
        assert!(delta
            .coefficients()
            .iter()
            .all(|c| *c == Complex64::new(1.0, 0.0)));
        let out = spectral_conv(&spec, &delta).unwrap();
        assert_eq!(out.coefficients(), spec.coefficients());
        assert_eq!(out.source(), Dims::new(2, 2));
    }

    #[test]
    fn conv_theorem_small_example() {
        let img = SpatialMap::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let ker = SpatialMap::filled(2, 2, 1.0).unwrap();
        let out = spectral_conv(
            &forward_transform(&img, 3, 3).unwrap(),
            &forward_transform(&ker, 3, 3).unwrap(),
        )
        .unwrap();
        assert_eq!(out.source(), Dims::new(3, 3));
        let back = inverse_transform(&out).unwrap();
        let expected = [1.0, 3.0, 2.0, 4.0, 10.0, 6.0, 3.0, 7.0, 4.0];
        for (a, e) in back.samples().iter().zip(expected) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_spectrum_annihilates() {
        let img = forward_transform(&SpatialMap::filled(2, 2, 3.0).unwrap(), 4, 4).unwrap();
        let zero = SpectralMap::zeros(Dims::new(4, 4), Dims::new(2, 2)).unwrap();
        let out = spectral_conv(&img, &zero).unwrap();
        assert!(out.coefficients().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn conv_rejects_wraparound_and_mismatch() {
        let img = forward_transform(&SpatialMap::filled(3, 3, 1.0).unwrap(), 4, 4).unwrap();
        let ker = forward_transform(&SpatialMap::filled(3, 3, 1.0).unwrap(), 4, 4).unwrap();
        assert!(matches!(
            spectral_conv(&img, &ker),
            Err(SpectralError::Dimension(_))
        ));
        let other = forward_transform(&SpatialMap::filled(1, 1, 1.0).unwrap(), 5, 4).unwrap();
        assert!(spectral_conv(&img, &other).is_err());
    }

    #[test]
    fn multichannel_cases() {
        let mut rng = StdRng::seed_from_u64(7);
        let img = random_map(&mut rng, 8, 8);
        let pad = (10, 10);
        let x = forward_transform(&img, pad.0, pad.1).unwrap();
        let kernels: Vec<SpatialMap> = (0..3).map(|_| random_map(&mut rng, 3, 3)).collect();
        let specs: Vec<SpectralMap> = kernels
            .iter()
            .map(|k| forward_transform(k, pad.0, pad.1).unwrap())
            .collect();
        let refs: Vec<&SpectralMap> = specs.iter().collect();

        let single = multichannel_spectral_conv(&x, &refs[..1]).unwrap();
        assert_eq!(single, spectral_conv(&x, refs[0]).unwrap());

        let summed = inverse_transform(&multichannel_spectral_conv(&x, &refs).unwrap()).unwrap();
        let mut oracle = direct_conv2(&img, &kernels[0]);
        for k in &kernels[1..] {
            oracle = oracle.combine(1.0, &direct_conv2(&img, k), 1.0).unwrap();
        }
        let err = crate::metrics::max_relative_error(summed.samples(), oracle.samples());
        assert!(err <= 1e-10, "{err}");

        let delta = forward_transform(&SpatialMap::from_rows(&[[1.0]]).unwrap(), 10, 10).unwrap();
        let doubled = multichannel_spectral_conv(&x, &[&delta, &delta]).unwrap();
        assert!(max_rel(&doubled, &x.scaled(2.0)) <= 1e-15);

        assert_eq!(
            multichannel_spectral_conv(&x, &[]),
            Err(SpectralError::EmptyKernelSet)
        );
    }

    #[test]
    fn support_bound_examples() {
        assert_eq!(
            support_bounds(32, 32, 5, 5).unwrap().dims(),
            Dims::new(36, 36)
        );
        assert_eq!(
            support_bounds(7, 11, 1, 1).unwrap().dims(),
            Dims::new(7, 11)
        );
        let out = direct_conv2(
            &SpatialMap::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap(),
            &SpatialMap::filled(2, 2, 1.0).unwrap(),
        );
        assert_eq!(support_bounds(2, 2, 2, 2).unwrap().dims(), out.dims());
        assert!(support_bounds(0, 1, 1, 1).is_err());
    }

    #[test]
    fn heaviside_full_and_delta() {
        let full = heaviside_spectrum(SupportBox::new(3, 5).unwrap(), 3, 5).unwrap();
        assert_eq!(full.get(0, 0), Complex64::new(15.0, 0.0));
        assert!(full.coefficients()[1..].iter().all(|c| c.norm() == 0.0));
        let delta = heaviside_spectrum(SupportBox::new(1, 1).unwrap(), 4, 6).unwrap();
        assert!(delta
            .coefficients()
            .iter()
            .all(|c| *c == Complex64::new(1.0, 0.0)));
        assert!(matches!(
            heaviside_spectrum(SupportBox::new(5, 1).unwrap(), 4, 4),
            Err(SpectralError::Bounds { .. })
        ));
    }

    #[test]
    fn heaviside_matches_naive_dft_of_indicator() {
        let indicator =
            SpatialMap::from_fn(4, 4, |r, c| if r < 2 && c < 3 { 1.0 } else { 0.0 }).unwrap();
        let oracle = naive_dft2(&ComplexGrid::from_real(&indicator));
        let got = heaviside_spectrum(SupportBox::new(2, 3).unwrap(), 4, 4).unwrap();
        assert!(max_relative_error_complex(got.coefficients(), oracle.values()) <= 1e-12);
        // DC counts the kept pixels
        assert!((got.get(0, 0) - Complex64::new(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn l_multiply_identity_zero_and_duality() {
        let mut rng = StdRng::seed_from_u64(11);
        let a_map = random_map(&mut rng, 4, 4);
        let b_map = random_map(&mut rng, 4, 4);
        let a = forward_transform(&a_map, 4, 4).unwrap();
        let b = forward_transform(&b_map, 4, 4).unwrap();

        let ones = heaviside_spectrum(SupportBox::new(4, 4).unwrap(), 4, 4).unwrap();
        assert!(max_rel(&l_multiply(&a, &ones).unwrap(), &a) <= 1e-12);

        let zero = SpectralMap::zeros(Dims::new(4, 4), Dims::new(4, 4)).unwrap();
        assert!(l_multiply(&a, &zero)
            .unwrap()
            .coefficients()
            .iter()
            .all(|c| c.norm() < 1e-15));

        let product = SpatialMap::new(
            4,
            4,
            a_map
                .samples()
                .iter()
                .zip(b_map.samples())
                .map(|(x, y)| x * y)
                .collect(),
        )
        .unwrap();
        let via_space = forward_transform(&product, 4, 4).unwrap();
        let got = l_multiply(&a, &b).unwrap();
        assert!(max_rel(&got, &via_space) <= 1e-10);

        let circ = circular_conv2(&a.to_grid(), &b.to_grid()).unwrap();
        let scaled: Vec<Complex64> = circ.values().iter().map(|c| c / 16.0).collect();
        assert!(max_relative_error_complex(got.coefficients(), &scaled) <= 1e-9);

        let other = SpectralMap::zeros(Dims::new(4, 5), Dims::new(1, 1)).unwrap();
        assert!(l_multiply(&a, &other).is_err());
    }

    #[test]
    fn activation_is_identity_when_support_is_inside_box() {
        let img = SpatialMap::from_rows(&[[1.0, -2.0], [3.0, 4.0]]).unwrap();
        let spec = forward_transform(&img, 5, 5).unwrap();
        let act = spectral_activation(&spec, SupportBox::new(3, 4).unwrap()).unwrap();
        assert!(max_rel(&act, &spec) <= 1e-12);
        let full = spectral_activation(&spec, SupportBox::new(5, 5).unwrap()).unwrap();
        assert!(max_rel(&full, &spec) <= 1e-12);
    }

    #[test]
    fn activation_equals_spatial_mask() {
        let mut rng = StdRng::seed_from_u64(5);
        let img = random_map(&mut rng, 2, 2);
        let ker = random_map(&mut rng, 2, 2);
        let c = spectral_conv(
            &forward_transform(&img, 4, 4).unwrap(),
            &forward_transform(&ker, 4, 4).unwrap(),
        )
        .unwrap();
        let support = SupportBox::new(3, 3).unwrap();
        let got = spectral_activation(&c, support).unwrap();
        let spatial = position_mask(&inverse_transform(&c).unwrap(), support).unwrap();
        let want = forward_transform(&spatial, 4, 4).unwrap();
        assert!(max_rel(&got, &want) <= 1e-10);

        // a box that cuts into the signal really does remove it
        let cut = SupportBox::new(2, 2).unwrap();
        let got = spectral_activation(&c, cut).unwrap();
        let spatial = position_mask(&inverse_transform(&c).unwrap(), cut).unwrap();
        assert!(max_rel(&got, &forward_transform(&spatial, 4, 4).unwrap()) <= 1e-10);
        assert_eq!(got.source(), Dims::new(2, 2));
    }
}
