//! Order-zero Bessel kernels.
//!
//! `J0` is evaluated piecewise: the Maclaurin series on `[0, 8]` and the
//! Hankel asymptotic expansion beyond, truncated at its smallest term.
//! Absolute error stays below `5e-7` on `[0, 500]` (in practice ~1e-13 for
//! t < 8 and ~3e-8 just above the switch point, shrinking like `exp(-2t)`).

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

const SERIES_CUTOFF: f64 = 8.0;

/// Selects the kernel `g` of the Funk–Hecke reduction for the ambient dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Two dimensions: `g = J0`, circle measure `2π`.
    Planar,
    /// Three dimensions: `g = j0`, sphere measure `4π`.
    Spherical,
}

impl KernelKind {
    pub fn eval(self, t: f64) -> Result<f64> {
        match self {
            KernelKind::Planar => bessel_j0(t),
            KernelKind::Spherical => spherical_j0(t),
        }
    }

    /// Measure of the unit sphere `S^{n-1}`.
    pub fn measure(self) -> f64 {
        match self {
            KernelKind::Planar => 2.0 * PI,
            KernelKind::Spherical => 4.0 * PI,
        }
    }
}

fn check_arg(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::invalid(format!(
            "kernel argument must be finite, got {t}"
        )));
    }
    // both kernels are even
    Ok(t.abs())
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(t: f64) -> Result<f64> {
    let t = check_arg(t)?;
    Ok(if t <= SERIES_CUTOFF {
        j0_series(t)
    } else {
        j0_asymptotic(t)
    })
}

fn j0_series(t: f64) -> f64 {
    let q = -(t * t) / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term.abs() >= 1e-16 || k < 3.0 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn j0_asymptotic(t: f64) -> f64 {
    // a_m = prod_{i<=m} (-(2i-1)^2) / (m! 8^m), term_m = a_m / t^m
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    for m in 1..64u32 {
        let mf = f64::from(m);
        let next = term * (-(2.0 * mf - 1.0).powi(2)) / (8.0 * mf * t);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if m % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = t - FRAC_PI_4;
    (2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Spherical Bessel function `j0(t) = sin t / t`.
pub fn spherical_j0(t: f64) -> Result<f64> {
    let t = check_arg(t)?;
    Ok(if t < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    })
}

/// Trapezoid-rule average of `cos(k θ·v)` over `q` equispaced directions.
///
/// Converges spectrally to `J0(k|v|)` once `q` exceeds `k|v|`.
pub fn circle_average_planewave(k: f64, v: Vec2, q: usize) -> Result<f64> {
    if q < 8 {
        return Err(Error::invalid(format!(
            "need at least 8 directions, got {q}"
        )));
    }
    if !(k >= 0.0 && k.is_finite()) || !v.is_finite() {
        return Err(Error::invalid(
            "wavenumber and vector must be finite, k >= 0",
        ));
    }
    let step = 2.0 * PI / q as f64;
    let sum: f64 = (0..q)
        .map(|i| {
            let phi = step * i as f64;
            (k * (phi.cos() * v.x + phi.sin() * v.y)).cos()
        })
        .sum();
    Ok(sum / q as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from the double-double series / Miller recurrence oracles in tests/common.
    const J0_AT_1: f64 = 0.765_197_686_557_966_6;
    const J0_AT_5: f64 = -0.177_596_771_314_338_3;
    const J0_AT_10: f64 = -0.245_935_764_451_348_3;
    const J0_AT_100: f64 = 0.019_985_850_304_223_06;
    const J0_AT_500: f64 = -0.034_100_556_880_731_96;

    #[test]
    fn j0_spot_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!(bessel_j0(2.404_825_557_695_773).unwrap().abs() < 1e-6);
        for (t, want) in [
            (1.0, J0_AT_1),
            (5.0, J0_AT_5),
            (10.0, J0_AT_10),
            (100.0, J0_AT_100),
            (500.0, J0_AT_500),
        ] {
            let got = bessel_j0(t).unwrap();
            assert!((got - want).abs() < 5e-7, "J0({t}) = {got}, want {want}");
        }
        assert!((bessel_j0(1.0).unwrap() - 0.765_197_686_6).abs() < 5e-7);
    }

    #[test]
    fn j0_continuous_across_switch() {
        let below = j0_series(SERIES_CUTOFF);
        let above = j0_asymptotic(SERIES_CUTOFF);
        assert!((below - above).abs() < 1e-7, "{below} vs {above}");
    }

    #[test]
    fn j0_is_even_and_rejects_non_finite() {
        assert_eq!(bessel_j0(-3.0).unwrap(), bessel_j0(3.0).unwrap());
        assert!(matches!(
            bessel_j0(f64::NAN),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            bessel_j0(f64::INFINITY),
            Err(Error::InvalidArgument(_))
        ));
        assert!(spherical_j0(f64::NAN).is_err());
    }

    #[test]
    fn spherical_j0_values() {
        assert_eq!(spherical_j0(0.0).unwrap(), 1.0);
        assert!(spherical_j0(PI).unwrap().abs() < 1e-12);
        assert!((spherical_j0(PI / 2.0).unwrap() - 2.0 / PI).abs() < 1e-12);
        assert!((spherical_j0(5e-5).unwrap() - (5e-5f64).sin() / 5e-5).abs() < 1e-15);
    }

    #[test]
    fn kernel_kind_dispatch() {
        assert_eq!(
            KernelKind::Planar.eval(1.0).unwrap(),
            bessel_j0(1.0).unwrap()
        );
        assert_eq!(
            KernelKind::Spherical.eval(1.0).unwrap(),
            spherical_j0(1.0).unwrap()
        );
        assert_eq!(KernelKind::Planar.measure(), 2.0 * PI);
        assert_eq!(KernelKind::Spherical.measure(), 4.0 * PI);
    }

    #[test]
    fn circle_average_examples() {
        let v = Vec2::new(0.3, -0.7);
        assert!((circle_average_planewave(0.0, v, 64).unwrap() - 1.0).abs() < 1e-15);
        let got = circle_average_planewave(1.0, Vec2::new(1.0, 0.0), 64).unwrap();
        assert!((got - J0_AT_1).abs() < 1e-10);
        let v = Vec2::new(8.0, 8.0);
        let got = circle_average_planewave(20.0, v, 512).unwrap();
        let want = bessel_j0(20.0 * v.norm()).unwrap();
        assert!((got - want).abs() < 1e-6);
        assert!(circle_average_planewave(1.0, v, 7).is_err());
    }

    #[test]
    fn circle_average_converges_spectrally() {
        let k = 3.0;
        let v = Vec2::new(2.0, 1.0);
        let exact = bessel_j0(k * v.norm()).unwrap();
        // once q > k|v| + 16 every doubling gains at least a decade until roundoff
        let mut q = (k * v.norm() + 16.0).ceil() as usize;
        let mut prev = (circle_average_planewave(k, v, q).unwrap() - exact).abs();
        while prev > 1e-12 {
            q *= 2;
            let err = (circle_average_planewave(k, v, q).unwrap() - exact).abs();
            assert!(
                err * 10.0 <= prev || err < 1e-12,
                "q={q}: {err} after {prev}"
            );
            prev = err;
        }
    }

    #[test]
    fn j0_decay_envelope() {
        let mut worst = 0.0f64;
        for i in 0..=4500 {
            let t = 50.0 + 0.1 * i as f64;
            worst = worst.max(bessel_j0(t).unwrap().abs() * (PI * t / 2.0).sqrt());
        }
        assert!(worst <= 1.01, "envelope {worst}");
    }
}
