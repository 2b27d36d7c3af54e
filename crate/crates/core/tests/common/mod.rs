//! Quadrature helpers shared by the oracle suites.
#![allow(dead_code)] // each test target uses a different subset
//!
//! All integrals over the estimator's support use the substitution
//! u = √(n + k), which removes the 1/√(n + k) edge singularity of the
//! folded density and turns every integrand into a smooth Gaussian-type
//! function of u. The integrand still evaluates the implementation's pdf —
//! the substitution is part of the quadrature scheme, not of the object
//! under test.

use failsafe_core::quad::integrate_with_breaks;
use failsafe_core::{Approach, NrDistribution};
use num_complex::Complex64;

/// Integration window in n-space: support edge to mean + `spread` sd.
pub fn window(dist: &NrDistribution, spread: f64) -> (f64, f64) {
    let m = dist.moments();
    let lo = dist.support_lower();
    (lo, m.mean + spread * m.variance.sqrt())
}

/// ∫ g(n)·pdf(n) dn over [lo_n, hi_n] via the u-substitution.
pub fn integral_against_pdf<G: Fn(f64) -> f64>(
    dist: &NrDistribution,
    lo_n: f64,
    hi_n: f64,
    g: G,
    tol: f64,
) -> f64 {
    let k = dist.params().k() as f64;
    // stay one representable step inside the folded edge; the skipped mass
    // is O(sqrt(ulp)) and far below every tolerance used here
    let u_lo = match dist.approach() {
        Approach::Folded if lo_n + k < k * 1e-14 => (k * 1e-14).sqrt(),
        _ => (lo_n + k).sqrt(),
    };
    let u_hi = (hi_n + k).sqrt();
    let u_mode = (dist.params().mu() / dist.params().z_alpha()).clamp(u_lo, u_hi);
    let f = |u: f64| {
        let n = u * u - k;
        g(n) * dist.pdf(n).expect("inside support") * 2.0 * u
    };
    integrate_with_breaks(f, &[u_lo, u_mode, u_hi], tol)
}

/// Total mass of the density over its support (should be 1).
pub fn pdf_mass(dist: &NrDistribution) -> f64 {
    let (lo, hi) = window(dist, 20.0);
    integral_against_pdf(dist, lo, hi, |_| 1.0, 1e-9)
}

/// Mean and variance of the density by quadrature.
pub fn pdf_moments(dist: &NrDistribution) -> (f64, f64) {
    let (lo, hi) = window(dist, 24.0);
    let mean = integral_against_pdf(dist, lo, hi, |n| n, 1e-10);
    let var = integral_against_pdf(dist, lo, hi, |n| (n - mean) * (n - mean), 1e-10);
    (mean, var)
}

/// Numerical Fourier integral ∫ exp(itn)·pdf(n) dn of the implementation's
/// density — the independent oracle for the closed-form characteristic
/// function.
pub fn fourier_of_pdf(dist: &NrDistribution, t: f64) -> Complex64 {
    let (lo, hi) = window(dist, 20.0);
    let re = integral_against_pdf(dist, lo, hi, |n| (t * n).cos(), 1e-7);
    let im = integral_against_pdf(dist, lo, hi, |n| (t * n).sin(), 1e-7);
    Complex64::new(re, im)
}
