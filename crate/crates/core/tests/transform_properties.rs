use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use specnet_core::metrics::max_relative_error_complex;
use specnet_core::oracle::naive_dft2;
use specnet_core::{
    forward_transform, inverse_transform, ComplexGrid, Dims, SpatialMap, SpectralMap,
};

fn random_map(rng: &mut StdRng, h: usize, w: usize, scale: f64) -> SpatialMap {
    SpatialMap::from_fn(h, w, |_, _| rng.gen_range(-scale..scale)).unwrap()
}

fn map_strategy(max: usize) -> impl Strategy<Value = (SpatialMap, usize, usize)> {
    (1..=max, 1..=max, 0..4usize, 0..4usize).prop_flat_map(|(h, w, ph, pw)| {
        proptest::collection::vec(-1e3..1e3f64, h * w)
            .prop_map(move |s| (SpatialMap::new(h, w, s).unwrap(), h + ph, w + pw))
    })
}

fn round_trip_error(m: &SpatialMap, pad: Dims) -> f64 {
    let back = inverse_transform(&forward_transform(m, pad.height, pad.width).unwrap()).unwrap();
    let window = back.crop(m.dims()).unwrap();
    let err = window
        .samples()
        .iter()
        .zip(m.samples())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    err / m.max_abs().max(1.0)
}

fn parseval_error(m: &SpatialMap, spec: &SpectralMap) -> f64 {
    let spatial: f64 = m.samples().iter().map(|v| v * v).sum();
    let spectral: f64 = spec
        .coefficients()
        .iter()
        .map(Complex64::norm_sqr)
        .sum::<f64>()
        / spec.padded().len() as f64;
    if spatial == 0.0 {
        spectral
    } else {
        (spatial - spectral).abs() / spatial
    }
}

fn asymmetry(spec: &SpectralMap) -> f64 {
    spec.conjugate_asymmetry() / spec.max_abs().max(1.0)
}

#[test]
fn invariants_hold_on_large_grids() {
    let mut rng = StdRng::seed_from_u64(7);
    for (h, w, ph, pw) in [
        (256, 256, 256, 256),
        (200, 131, 256, 256),
        (97, 256, 128, 256),
        (255, 3, 256, 17),
    ] {
        let m = random_map(&mut rng, h, w, 10.0);
        let spec = forward_transform(&m, ph, pw).unwrap();
        assert!(round_trip_error(&m, Dims::new(ph, pw)) <= 1e-10, "{h}x{w}");
        assert!(parseval_error(&m, &spec) <= 1e-10, "{h}x{w}");
        assert!(asymmetry(&spec) <= 1e-12, "{h}x{w}");
    }
}

#[test]
fn fast_transform_matches_naive_dft() {
    let mut rng = StdRng::seed_from_u64(11);
    for (h, w, ph, pw) in [(3, 5, 7, 6), (6, 6, 6, 6), (1, 9, 2, 11), (5, 1, 13, 1)] {
        let m = random_map(&mut rng, h, w, 1.0);
        let mut padded = vec![0.0; ph * pw];
        for r in 0..h {
            for c in 0..w {
                padded[r * pw + c] = m.get(r, c);
            }
        }
        let oracle = naive_dft2(&ComplexGrid::from_real(
            &SpatialMap::new(ph, pw, padded).unwrap(),
        ));
        let fast = forward_transform(&m, ph, pw).unwrap();
        assert!(max_relative_error_complex(fast.coefficients(), oracle.values()) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip((m, ph, pw) in map_strategy(24)) {
        prop_assert!(round_trip_error(&m, Dims::new(ph, pw)) <= 1e-10);
    }

    #[test]
    fn parseval((m, ph, pw) in map_strategy(24)) {
        let spec = forward_transform(&m, ph, pw).unwrap();
        prop_assert!(parseval_error(&m, &spec) <= 1e-10);
    }

    #[test]
    fn conjugate_symmetry((m, ph, pw) in map_strategy(24)) {
        prop_assert!(asymmetry(&forward_transform(&m, ph, pw).unwrap()) <= 1e-12);
    }

    #[test]
    fn linearity((m1, ph, pw) in map_strategy(16), alpha in -5.0..5.0f64, beta in -5.0..5.0f64, seed in any::<u64>()) {
        let m2 = random_map(&mut StdRng::seed_from_u64(seed), m1.height(), m1.width(), 1e3);
        let lhs = forward_transform(&m1.combine(alpha, &m2, beta).unwrap(), ph, pw).unwrap();
        let f1 = forward_transform(&m1, ph, pw).unwrap();
        let f2 = forward_transform(&m2, ph, pw).unwrap();
        let rhs: Vec<Complex64> = f1
            .coefficients()
            .iter()
            .zip(f2.coefficients())
            .map(|(a, b)| a * alpha + b * beta)
            .collect();
        prop_assert!(max_relative_error_complex(lhs.coefficients(), &rhs) <= 1e-10);
    }
}
