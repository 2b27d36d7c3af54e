//! Error function on the complex plane, for the normal CDF at complex
//! argument that the truncated-approach characteristic function needs.
//!
//! Strategy: Maclaurin series inside |z| ≤ 4, and outside the scaled
//! complementary form erfc(z) = exp(−z²)·w(iz) with the Faddeeva function
//! evaluated by the Laplace continued fraction (valid in the upper half
//! plane; arguments are reflected there first).
//!
//! The continued fraction loses accuracy in the lens |z| > 4 close to the
//! imaginary axis. The characteristic-function arguments this module serves
//! never enter it: they leave the series disc along a ray bounded away from
//! the imaginary axis (45° in the large-t limit), where both branches hold
//! 1e-9 or better.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

const SQRT_PI: f64 = 1.772453850905516;

/// Maclaurin series for erf, adequate for |z| ≤ 4.
fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut power = z; // (-1)^n z^(2n+1) / n!
    let mut sum = z;
    for n in 1..=140 {
        power = power * -z2 / n as f64;
        let term = power / (2 * n + 1) as f64;
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-280) {
            break;
        }
    }
    sum * (2.0 / SQRT_PI)
}

/// Faddeeva w(z) by the Laplace continued fraction; Im(z) ≥ 0, |z| ≳ 4.
fn faddeeva_cf(z: Complex64) -> Complex64 {
    let mut f = z;
    for j in (1..=60).rev() {
        f = z - Complex64::new(j as f64 / 2.0, 0.0) / f;
    }
    Complex64::i() / (SQRT_PI * f)
}

/// erfc for Re(z) ≥ 0 and |z| > 4, via the scaled form.
fn erfc_large(z: Complex64) -> Complex64 {
    (-z * z).exp() * faddeeva_cf(Complex64::i() * z)
}

/// Complementary error function of a complex argument.
pub(crate) fn erfc_cplx(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(crate::erf::erfc(z.re), 0.0);
    }
    if z.re < 0.0 {
        return Complex64::new(2.0, 0.0) - erfc_cplx(-z);
    }
    if z.norm_sqr() <= 16.0 {
        Complex64::new(1.0, 0.0) - erf_series(z)
    } else {
        erfc_large(z)
    }
}

/// Standard normal CDF continued to complex argument, Φ(z) = erfc(−z/√2)/2.
pub(crate) fn std_normal_cdf_cplx(z: Complex64) -> Complex64 {
    0.5 * erfc_cplx(-z * FRAC_1_SQRT_2)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen 18-digit oracle values
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, rel: f64) {
        let scale = b.norm().max(1e-300);
        assert!(
            (a - b).norm() <= rel * scale,
            "{a} vs {b} (rel {})",
            (a - b).norm() / scale
        );
    }

    #[test]
    fn erfc_series_region() {
        close(
            erfc_cplx(Complex64::new(1.0, 1.0)),
            Complex64::new(-0.316151281697947645, -0.190453469237834686),
            1e-13,
        );
        close(
            erfc_cplx(Complex64::new(0.5, 0.3)),
            Complex64::new(0.43843481147578684, -0.267605864957603583),
            1e-13,
        );
        close(
            erfc_cplx(Complex64::new(2.0, -3.0)),
            Complex64::new(21.8294614276145684, 8.68731827147016314),
            1e-11,
        );
        // reflection path
        close(
            erfc_cplx(Complex64::new(-1.5, 2.0)),
            Complex64::new(0.894950710225982467, -0.699511686163124457),
            1e-11,
        );
    }

    #[test]
    fn erfc_large_region() {
        close(
            erfc_cplx(Complex64::new(4.5, 0.1)),
            Complex64::new(1.20089509875720304e-10, -1.58114702645805638e-10),
            1e-9,
        );
        close(
            erfc_cplx(Complex64::new(4.0, 3.0)),
            Complex64::new(8.93382146083176361e-5, 4.97202605449660365e-5),
            1e-9,
        );
        // the 45-degree ray the CF arguments approach for large t
        close(
            erfc_cplx(Complex64::new(3.2, -3.2)),
            Complex64::new(-0.0910868471318837525, 0.0848547432183864769),
            1e-10,
        );
        close(
            erfc_cplx(Complex64::new(5.0, 2.0)),
            Complex64::new(4.00293555775272374e-12, -7.83582046669295226e-11),
            1e-9,
        );
        close(
            erfc_cplx(Complex64::new(6.0, 1.0)),
            Complex64::new(5.30779980060804101e-17, 2.27763503336924899e-17),
            1e-9,
        );
    }

    #[test]
    fn matches_real_axis() {
        for x in [-3.0, -0.4, 0.0, 1.2, 5.5] {
            let c = std_normal_cdf_cplx(Complex64::new(x, 0.0));
            assert!((c.re - crate::normal::std_normal_cdf(x)).abs() < 1e-14);
            assert_eq!(c.im, 0.0);
        }
    }
}
