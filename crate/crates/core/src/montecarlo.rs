//! Seeded simulation of half-normal sums and fail-safe estimator draws,
//! with histogram and goodness-of-fit helpers.
//!
//! Reproducibility contract: every rep draws from its own ChaCha8 stream
//! selected by `(master_seed, rep_index)`, so a batch is a pure function of
//! the seed and the parameters, bit-identical under any rayon worker count.

use crate::dist::SumParams;
use crate::error::{Error, Result};
use crate::normal::sample_std_normal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// What a batch of draws represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Raw sums S = Σ|N(0,1)| of k draws.
    SumsOnly,
    /// Estimator draws, keeping only reps with S ≥ Z_α√k (so N̂ ≥ 0).
    NrTruncated,
    /// Estimator draws, all reps kept (support (−k, ∞)).
    NrFolded,
}

/// Seeded draws plus the provenance needed to reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationBatch {
    values: Vec<f64>,
    k: usize,
    reps_requested: usize,
    reps_kept: usize,
    regime: Regime,
    master_seed: u64,
    alpha: Option<f64>,
}

impl SimulationBatch {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn reps_requested(&self) -> usize {
        self.reps_requested
    }

    pub fn reps_kept(&self) -> usize {
        self.reps_kept
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }
}

/// One rep's sum of k half-normal draws from its dedicated stream.
#[inline]
fn one_sum(k: usize, seed: u64, rep: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    (0..k).map(|_| sample_std_normal(&mut rng).abs()).sum()
}

/// `reps` draws of S = Σᵢ₌₁ᵏ |N(0,1)|.
pub fn simulate_half_normal_sums(k: usize, reps: usize, seed: u64) -> Result<SimulationBatch> {
    if k == 0 || reps == 0 {
        return Err(Error::domain(format!(
            "k and reps must be positive, got k={k} reps={reps}"
        )));
    }
    let values: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| one_sum(k, seed, rep))
        .collect();
    Ok(SimulationBatch {
        reps_kept: values.len(),
        values,
        k,
        reps_requested: reps,
        regime: Regime::SumsOnly,
        master_seed: seed,
        alpha: None,
    })
}

/// `reps` draws of the estimator N̂ = S²/Z_α² − k under the given regime.
///
/// The truncated regime discards reps whose sum falls below the cut Z_α√k
/// and records how many survived; the folded regime keeps everything.
pub fn simulate_nr(
    k: usize,
    alpha: f64,
    reps: usize,
    seed: u64,
    regime: Regime,
) -> Result<SimulationBatch> {
    if regime == Regime::SumsOnly {
        return Err(Error::domain(
            "simulate_nr needs the NrTruncated or NrFolded regime",
        ));
    }
    if reps == 0 {
        return Err(Error::domain("reps must be positive"));
    }
    let params = SumParams::new(k, alpha)?;
    let za_sq = params.z_alpha() * params.z_alpha();
    let cut = params.cut();
    let kf = k as f64;
    let values: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .filter_map(|rep| {
            let s = one_sum(k, seed, rep);
            if regime == Regime::NrTruncated && s < cut {
                None
            } else {
                Some(s * s / za_sq - kf)
            }
        })
        .collect();
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    Ok(SimulationBatch {
        reps_kept: values.len(),
        values,
        k,
        reps_requested: reps,
        regime,
        master_seed: seed,
        alpha: Some(alpha),
    })
}

/// Bin-count selection for [`histogram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bins {
    /// Freedman–Diaconis width 2·IQR·n^(−1/3), square-root rule fallback
    /// when the IQR degenerates.
    Auto,
    Fixed(usize),
}

/// Equal-width histogram of a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramData {
    /// n+1 strictly increasing edges for n bins.
    pub bin_edges: Vec<f64>,
    /// Raw counts per bin; values equal to the last edge land in the last bin.
    pub counts: Vec<u64>,
    /// Whether [`HistogramData::densities`] integrates to one.
    pub density_scale: bool,
}

impl HistogramData {
    /// Bar heights on the density scale: count/(total·width).
    pub fn densities(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&c, w)| c as f64 / (total as f64 * (w[1] - w[0])))
            .collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

fn quartiles(sorted: &[f64]) -> (f64, f64) {
    let pick = |q: f64| -> f64 {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    };
    (pick(0.25), pick(0.75))
}

/// Histogram of the batch values; density bars integrate to one.
pub fn histogram(batch: &SimulationBatch, bins: Bins) -> Result<HistogramData> {
    let values = batch.values();
    if values.is_empty() {
        return Err(Error::domain("cannot histogram an empty batch"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let (lo, hi) = if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    };
    let n_bins = match bins {
        Bins::Fixed(n) => {
            if n == 0 {
                return Err(Error::domain("bin count must be positive"));
            }
            n
        }
        Bins::Auto => {
            let n = sorted.len() as f64;
            let (q1, q3) = quartiles(&sorted);
            let fd_width = 2.0 * (q3 - q1) / n.cbrt();
            let count = if fd_width > 0.0 {
                ((hi - lo) / fd_width).ceil()
            } else {
                n.sqrt().ceil()
            };
            (count as usize).clamp(1, 10_000)
        }
    };
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let bin_edges = (0..=n_bins)
        .map(|i| {
            if i == n_bins {
                hi // exact upper edge, no accumulation error
            } else {
                lo + width * i as f64
            }
        })
        .collect();
    Ok(HistogramData {
        bin_edges,
        counts,
        density_scale: true,
    })
}

/// Two-sided Kolmogorov–Smirnov statistic of a batch against a reference CDF.
///
/// D = maxᵢ max(i/n − F(x₍ᵢ₎), F(x₍ᵢ₎) − (i−1)/n) over the sorted sample.
/// For a constant batch against a continuous CDF this degenerates to
/// max(F(v), 1 − F(v)) — the structural maximum, not zero.
pub fn ks_statistic<F: Fn(f64) -> f64>(batch: &SimulationBatch, cdf: F) -> f64 {
    let mut sorted = batch.values().to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value c(α)/√n with c(α) = √(−ln(α/2)/2).
pub fn ks_critical_value(n: usize, significance: f64) -> f64 {
    ((-(significance / 2.0).ln()) / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::{HalfNormal, ONE_MINUS_2_OVER_PI, SQRT_2_OVER_PI};
    use proptest::prelude::*;

    #[test]
    fn sums_are_deterministic_and_positive() {
        let a = simulate_half_normal_sums(7, 500, 99).unwrap();
        let b = simulate_half_normal_sums(7, 500, 99).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().iter().all(|&s| s > 0.0));
        assert_eq!(a.reps_kept(), 500);
        let c = simulate_half_normal_sums(7, 500, 100).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn determinism_across_worker_counts() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_half_normal_sums(3, 2000, 5).unwrap())
        };
        assert_eq!(run(1).values(), run(4).values());
    }

    #[test]
    fn single_study_sums_match_half_normal_mean() {
        let batch = simulate_half_normal_sums(1, 200_000, 21).unwrap();
        let mean = batch.values().iter().sum::<f64>() / batch.reps_kept() as f64;
        let band = 4.0 * (ONE_MINUS_2_OVER_PI / batch.reps_kept() as f64).sqrt();
        assert!((mean - SQRT_2_OVER_PI).abs() < band, "mean {mean}");
    }

    #[test]
    fn k50_sum_mean_within_clt_band() {
        let k = 50;
        let reps = 1_000_000;
        let batch = simulate_half_normal_sums(k, reps, 8).unwrap();
        let mean = batch.values().iter().sum::<f64>() / reps as f64;
        let expected = k as f64 * SQRT_2_OVER_PI;
        let band = 4.0 * (k as f64 * ONE_MINUS_2_OVER_PI / reps as f64).sqrt();
        assert!((mean - expected).abs() < band, "mean {mean} vs {expected}");
    }

    #[test]
    fn bad_arguments_error() {
        assert!(simulate_half_normal_sums(0, 10, 1).is_err());
        assert!(simulate_half_normal_sums(10, 0, 1).is_err());
        assert!(simulate_nr(5, 0.05, 10, 1, Regime::SumsOnly).is_err());
        assert!(simulate_nr(5, 0.6, 10, 1, Regime::NrFolded).is_err());
    }

    #[test]
    fn nr_regimes_respect_supports() {
        let t = simulate_nr(5, 0.05, 20_000, 3, Regime::NrTruncated).unwrap();
        assert!(t.values().iter().all(|&v| v >= 0.0));
        assert!(t.reps_kept() < t.reps_requested()); // cut bites at k = 5
        let f = simulate_nr(5, 0.05, 20_000, 3, Regime::NrFolded).unwrap();
        assert!(f.values().iter().all(|&v| v > -5.0));
        assert_eq!(f.reps_kept(), 20_000);
    }

    #[test]
    fn truncated_with_no_survivors_errors() {
        // at k = 1 and alpha = 1e-9 the cut survives with probability ~3e-18
        match simulate_nr(1, 1e-9, 2000, 17, Regime::NrTruncated) {
            Err(Error::EmptyBatch) => {}
            other => panic!("expected empty batch, got {other:?}"),
        }
    }

    #[test]
    fn single_value_histogram() {
        let batch = SimulationBatch {
            values: vec![2.5],
            k: 1,
            reps_requested: 1,
            reps_kept: 1,
            regime: Regime::SumsOnly,
            master_seed: 0,
            alpha: None,
        };
        let h = histogram(&batch, Bins::Fixed(1)).unwrap();
        assert_eq!(h.counts, vec![1]);
        let w = h.bin_edges[1] - h.bin_edges[0];
        assert_eq!(h.densities(), vec![1.0 / w]);
    }

    #[test]
    fn density_bars_integrate_to_one() {
        let batch = simulate_half_normal_sums(4, 30_000, 12).unwrap();
        let h = histogram(&batch, Bins::Auto).unwrap();
        let mass: f64 = h
            .densities()
            .iter()
            .zip(h.bin_edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum();
        assert!((mass - 1.0).abs() < 1e-12, "mass {mass}");
        assert_eq!(h.counts.iter().sum::<u64>(), 30_000);
    }

    #[test]
    fn ks_hand_example() {
        let batch = SimulationBatch {
            values: vec![3.0, 1.0, 2.0],
            k: 1,
            reps_requested: 3,
            reps_kept: 3,
            regime: Regime::SumsOnly,
            master_seed: 0,
            alpha: None,
        };
        let d = ks_statistic(&batch, |x| x / 4.0);
        assert!((d - 0.25).abs() < 1e-15, "{d}");
    }

    #[test]
    fn ks_of_constant_batch_is_structural_maximum() {
        // documented convention: a point mass against a continuous CDF
        // yields max(F(v), 1 - F(v)), never zero
        let batch = SimulationBatch {
            values: vec![2.0; 8],
            k: 1,
            reps_requested: 8,
            reps_kept: 8,
            regime: Regime::SumsOnly,
            master_seed: 0,
            alpha: None,
        };
        let d = ks_statistic(&batch, |x| x / 4.0); // F(2) = 0.5
        assert!((d - 0.5).abs() < 1e-15, "{d}");
        let d_skew = ks_statistic(&batch, |x| x / 10.0); // F(2) = 0.2
        assert!((d_skew - 0.8).abs() < 1e-15, "{d_skew}");
    }

    #[test]
    fn ks_of_exact_sampler_passes_one_percent() {
        // k = 1 sums are exactly half-normal, so this tests sampler + KS, not CLT
        let batch = simulate_half_normal_sums(1, 100_000, 31).unwrap();
        let hn = HalfNormal::new(1.0).unwrap();
        let d = ks_statistic(&batch, |y| hn.cdf(y));
        let crit = ks_critical_value(batch.reps_kept(), 0.01);
        assert!(d < crit, "D={d} crit={crit}");
    }

    #[test]
    fn ks_critical_reference() {
        let c = ks_critical_value(100_000, 0.01);
        assert!((c * (100_000f64).sqrt() - 1.62762363072) < 1e-9);
    }

    #[test]
    fn ks_invariant_under_monotone_transform() {
        let batch = simulate_half_normal_sums(2, 5_000, 44).unwrap();
        let dist = crate::dist::NrDistribution::folded(SumParams::new(2, 0.05).unwrap());
        let nr_cdf = |x: f64| dist.cdf(x);
        let d1 = {
            let base = simulate_nr(2, 0.05, 5_000, 44, Regime::NrFolded).unwrap();
            ks_statistic(&base, nr_cdf)
        };
        // same draws expressed in S-space against the equivalent CDF
        let p = SumParams::new(2, 0.05).unwrap();
        let za_sq = p.z_alpha() * p.z_alpha();
        let d2 = ks_statistic(&batch, |s| nr_cdf(s * s / za_sq - 2.0));
        assert!((d1 - d2).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn histogram_conserves_counts(seed in 0u64..500, reps in 1usize..400) {
            let batch = simulate_half_normal_sums(2, reps, seed).unwrap();
            let h = histogram(&batch, Bins::Auto).unwrap();
            prop_assert_eq!(h.counts.iter().sum::<u64>(), reps as u64);
            prop_assert!(h.bin_edges.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
