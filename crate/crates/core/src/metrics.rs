//! Error measures used by equivalence checks.
//!
//! "Relative" error throughout is the max-norm error divided by the max-norm
//! of the reference; an all-zero reference falls back to absolute error.

use num_complex::Complex64;

fn ratio(worst: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// `max |a - e| / max |e|`. Panics if the slices differ in length.
pub fn max_relative_error(actual: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(
        actual.len(),
        expected.len(),
        "compared slices differ in length"
    );
    let worst = actual
        .iter()
        .zip(expected)
        .fold(0.0f64, |m, (a, e)| m.max((a - e).abs()));
    ratio(worst, expected.iter().fold(0.0f64, |m, e| m.max(e.abs())))
}

pub fn max_relative_error_complex(actual: &[Complex64], expected: &[Complex64]) -> f64 {
    assert_eq!(
        actual.len(),
        expected.len(),
        "compared slices differ in length"
    );
    let worst = actual
        .iter()
        .zip(expected)
        .fold(0.0f64, |m, (a, e)| m.max((a - e).norm()));
    ratio(worst, expected.iter().fold(0.0f64, |m, e| m.max(e.norm())))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "compared slices differ in length");
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "compared slices differ in length");
    if a.is_empty() {
        return 0.0;
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum / a.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_uses_reference_scale() {
        assert_eq!(max_relative_error(&[2.0, 4.5], &[2.0, 4.0]), 0.125);
        assert_eq!(max_relative_error(&[0.5], &[0.0]), 0.5);
        assert_eq!(rms_diff(&[1.0, 1.0], &[0.0, 0.0]), 1.0);
    }
}
