//! Quadrature and sampling invariants of the normal-family primitives.

use failsafe_core::montecarlo::{ks_critical_value, ks_statistic, simulate_half_normal_sums};
use failsafe_core::normal::{FoldedNormal, HalfNormal};
use failsafe_core::quad::integrate_with_breaks;

const XI_GRID: [f64; 3] = [0.0, 1.0, 5.0];
const OMEGA_GRID: [f64; 3] = [0.5, 1.0, 3.0];

fn breaks(f: &FoldedNormal) -> Vec<f64> {
    // window: support edge to mean + 12 sd equivalents, split at the folds
    let hi = f.mean() + 12.0 * f.variance().sqrt();
    let mut b = vec![0.0, f.xi().abs().min(hi * 0.5), hi];
    b.dedup();
    b
}

#[test]
fn folded_density_normalizes_on_grid() {
    for xi in XI_GRID {
        for omega in OMEGA_GRID {
            let f = FoldedNormal::new(xi, omega).unwrap();
            let mass = integrate_with_breaks(|y| f.pdf(y), &breaks(&f), 1e-11);
            assert!(
                (mass - 1.0).abs() < 1e-8,
                "xi={xi} omega={omega}: mass {mass}"
            );
        }
    }
}

#[test]
fn folded_moments_match_quadrature_on_grid() {
    for xi in XI_GRID {
        for omega in OMEGA_GRID {
            let f = FoldedNormal::new(xi, omega).unwrap();
            let mean_q = integrate_with_breaks(|y| y * f.pdf(y), &breaks(&f), 1e-12);
            let var_q = integrate_with_breaks(
                |y| (y - mean_q) * (y - mean_q) * f.pdf(y),
                &breaks(&f),
                1e-12,
            );
            assert!(
                ((f.mean() - mean_q) / mean_q).abs() < 1e-8,
                "xi={xi} omega={omega}: mean {} vs {}",
                f.mean(),
                mean_q
            );
            assert!(
                ((f.variance() - var_q) / var_q).abs() < 1e-8,
                "xi={xi} omega={omega}: var {} vs {}",
                f.variance(),
                var_q
            );
        }
    }
}

#[test]
fn half_normal_sampler_passes_ks_against_its_own_cdf() {
    // draws are exactly half-normal, so this isolates sampler quality
    let batch = simulate_half_normal_sums(1, 100_000, 314).unwrap();
    let unit = HalfNormal::new(1.0).unwrap();
    let d = ks_statistic(&batch, |y| unit.cdf(y));
    let crit = ks_critical_value(batch.reps_kept(), 0.01);
    assert!(d < crit, "D={d} crit={crit}");
    // a wrongly scaled reference must fit far worse
    let wrong = HalfNormal::new(1.5).unwrap();
    let d_wrong = ks_statistic(&batch, |y| wrong.cdf(y));
    assert!(d_wrong > 20.0 * d, "wrong-scale D={d_wrong} vs D={d}");
}
