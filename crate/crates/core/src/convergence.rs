//! Convergence-rate study: sweep k, average simulated estimator values,
//! form the absolute relative error against the closed-form mean, and fit a
//! log-log least-squares line whose slope estimates the convergence order.

use crate::dist::{NrDistribution, SumParams};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_nr, Regime};
use rayon::prelude::*;
use serde::Serialize;

/// Which closed-form mean plays the role of the true value. The two differ
/// by the truncation correction ε, which is negligible past a couple dozen
/// studies; the folded form is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthSource {
    FoldedMean,
    TruncatedMean,
}

/// One k-point of the study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub k: usize,
    /// Mean of the simulated estimator values at this k.
    pub mean_estimate: f64,
    /// Closed-form mean used as the truth.
    pub true_value: f64,
    /// |mean_estimate − true_value| / true_value.
    pub abs_rel_error: f64,
    /// mean_estimate / true_value, the diagnostic that should hug 1.
    pub ratio: f64,
}

/// A k-point skipped because its closed-form mean was not positive, so no
/// relative error can be formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub k: usize,
    pub true_value: f64,
}

/// Study output: usable records plus the skipped points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub records: Vec<ConvergenceRecord>,
    pub skipped: Vec<SkippedPoint>,
}

/// Log-log least-squares fit of error against k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval for the slope from the classical OLS
    /// standard error and a Student-t quantile.
    pub slope_ci_95: (f64, f64),
    /// Records actually used (zero-error points are excluded from the fit).
    pub n_points: usize,
}

enum Point {
    Record(ConvergenceRecord),
    Skipped(SkippedPoint),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream-space separation between k-points, so draws never overlap across
/// the grid no matter how it is partitioned.
fn per_k_seed(seed: u64, k: usize) -> u64 {
    splitmix64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Run the sweep: at each k simulate `reps_per_k` estimator values in the
/// folded regime (all values kept), average, and compare with the closed
/// form. Deterministic for a given seed, parallel across the grid.
pub fn convergence_study(
    k_grid: &[usize],
    reps_per_k: usize,
    alpha: f64,
    seed: u64,
    truth: TruthSource,
) -> Result<ConvergenceStudy> {
    if k_grid.is_empty() {
        return Err(Error::domain("k grid must not be empty"));
    }
    if reps_per_k < 2 {
        return Err(Error::domain("need at least 2 reps per k"));
    }
    let points: Vec<Point> = k_grid
        .par_iter()
        .map(|&k| -> Result<Point> {
            let params = SumParams::new(k, alpha)?;
            let dist = match truth {
                TruthSource::FoldedMean => NrDistribution::folded(params),
                TruthSource::TruncatedMean => NrDistribution::truncated(params),
            };
            let true_value = dist.moments().mean;
            if true_value <= 0.0 {
                return Ok(Point::Skipped(SkippedPoint { k, true_value }));
            }
            let batch = simulate_nr(k, alpha, reps_per_k, per_k_seed(seed, k), Regime::NrFolded)?;
            let mean_estimate =
                batch.values().iter().sum::<f64>() / batch.reps_kept() as f64;
            Ok(Point::Record(ConvergenceRecord {
                k,
                mean_estimate,
                true_value,
                abs_rel_error: (mean_estimate - true_value).abs() / true_value.abs(),
                ratio: mean_estimate / true_value,
            }))
        })
        .collect::<Result<_>>()?;

    let mut study = ConvergenceStudy {
        records: Vec::new(),
        skipped: Vec::new(),
    };
    for p in points {
        match p {
            Point::Record(r) => study.records.push(r),
            Point::Skipped(s) => study.skipped.push(s),
        }
    }
    Ok(study)
}

/// Ordinary least squares of log(error) on log(k) with a 95% slope CI.
///
/// Records with exactly zero error have no logarithm and are left out
/// rather than clamped (clamping would bias the slope); `n_points` reports
/// how many survived.
pub fn ols_loglog(records: &[ConvergenceRecord]) -> Result<ConvergenceFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.abs_rel_error > 0.0)
        .map(|r| ((r.k as f64).ln(), r.abs_rel_error.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewRecords {
            needed: 3,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    let tq = students_t_quantile(0.975, pts.len() - 2);
    Ok(ConvergenceFit {
        slope,
        intercept,
        slope_ci_95: (slope - tq * se, slope + tq * se),
        n_points: pts.len(),
    })
}

// --- Student-t quantile via the regularized incomplete beta -------------

/// Lanczos (g = 7) log-gamma for positive arguments.
#[allow(clippy::excessive_precision)]
fn ln_gamma(z: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(z > 0.0);
    let mut x = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += c / (z - 1.0 + i as f64);
    }
    let t = z + 6.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z - 0.5) * t.ln() - t + x.ln()
}

/// Continued fraction for the incomplete beta (Lentz's method).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 3e-16 {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

/// CDF of Student's t with `df` degrees of freedom.
fn students_t_cdf(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let tail = 0.5 * beta_inc(0.5 * df, 0.5, x);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Quantile of Student's t by bisection on its CDF.
pub fn students_t_quantile(p: f64, df: usize) -> f64 {
    assert!(p > 0.0 && p < 1.0, "p must lie in (0,1), got {p}");
    assert!(df >= 1, "df must be at least 1");
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -students_t_quantile(1.0 - p, df);
    }
    let dff = df as f64;
    let mut lo = 0.0;
    let mut hi = 2.0;
    while students_t_cdf(hi, dff) < p {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if students_t_cdf(mid, dff) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
