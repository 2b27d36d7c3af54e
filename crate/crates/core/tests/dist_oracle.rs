//! Quadrature-based oracle checks of the distribution layer: the closed-form
//! CDF against integrated pdf, and quantile/CDF round trips.

mod common;

use common::{integral_against_pdf, window};
use failsafe_core::{Approach, NrDistribution, SumParams};
use proptest::prelude::*;

fn dist(approach: Approach, k: usize) -> NrDistribution {
    NrDistribution::new(approach, SumParams::new(k, 0.05).unwrap())
}

#[test]
fn cdf_matches_integrated_pdf() {
    for approach in [Approach::Truncated, Approach::Folded] {
        for k in [5usize, 15] {
            let d = dist(approach, k);
            let (lo, _) = window(&d, 0.0);
            let m = d.moments();
            let sd = m.variance.sqrt();
            for x in [
                m.mean - 1.5 * sd,
                m.mean - 0.3 * sd,
                m.mean,
                m.mean + 2.0 * sd,
            ] {
                if x <= lo {
                    continue;
                }
                let by_quad = integral_against_pdf(&d, lo, x, |_| 1.0, 1e-10);
                let by_formula = d.cdf(x);
                assert!(
                    (by_quad - by_formula).abs() < 1e-7,
                    "{approach:?} k={k} x={x}: quad {by_quad} vs cdf {by_formula}"
                );
            }
        }
    }
}

#[test]
fn quantile_round_trips() {
    for approach in [Approach::Truncated, Approach::Folded] {
        for k in [5usize, 15, 50] {
            let d = dist(approach, k);
            let m = d.moments();
            let sd = m.variance.sqrt();
            // x -> cdf -> quantile
            for step in [-1.2, -0.4, 0.0, 0.8, 2.5] {
                let x = m.mean + step * sd;
                if x <= d.support_lower() {
                    continue;
                }
                let p = d.cdf(x);
                if p <= 0.0 || p >= 1.0 {
                    continue;
                }
                let back = d.quantile(p).unwrap();
                assert!(
                    (back - x).abs() < 1e-6 * x.abs().max(1.0),
                    "{approach:?} k={k}: {x} -> {p} -> {back}"
                );
            }
            // p -> quantile -> cdf
            for p in [1e-4, 0.05, 0.5, 0.95, 0.9999] {
                let x = d.quantile(p).unwrap();
                assert!(
                    (d.cdf(x) - p).abs() < 1e-8,
                    "{approach:?} k={k}: p={p} cdf(q)={}",
                    d.cdf(x)
                );
            }
        }
    }
}

#[test]
fn truncated_quantile_collapses_to_support_edge() {
    let d = dist(Approach::Truncated, 15);
    let mut last = f64::INFINITY;
    for p in [1e-2, 1e-4, 1e-8, 1e-12] {
        let q = d.quantile(p).unwrap();
        assert!(q >= 0.0 && q < last);
        last = q;
    }
    assert!(last < 1e-6, "quantile near p=0 should approach 0, got {last}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quantile_cdf_round_trip_random(
        p in 1e-4f64..0.9999,
        k in 2usize..60,
        folded in proptest::bool::ANY,
    ) {
        let approach = if folded { Approach::Folded } else { Approach::Truncated };
        let d = dist(approach, k);
        let x = d.quantile(p).unwrap();
        prop_assert!((d.cdf(x) - p).abs() < 1e-8);
    }
}
