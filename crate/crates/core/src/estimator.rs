//! Study sets, Stouffer's pooled statistic and the fail-safe number.
//!
//! The fail-safe number answers: how many unpublished studies averaging a
//! null result would pull the pooled one-tailed significance of `k` observed
//! studies back above `alpha`? With S = ΣZᵢ and Z_α the one-tailed critical
//! value it is S²/Z_α² − k, reported raw (possibly negative) alongside the
//! value clamped at zero, and compared against the 5k+10 rule of thumb.

use crate::error::{Error, Result};
use crate::normal::{std_normal_quantile, std_normal_sf};
use serde::Serialize;

/// The per-study Z-scores feeding every downstream computation.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySet {
    z_scores: Vec<f64>,
}

impl StudySet {
    /// Build from Z-scores directly. Needs at least one finite score.
    pub fn from_z_scores(z_scores: Vec<f64>) -> Result<Self> {
        if z_scores.is_empty() {
            return Err(Error::domain("study set must contain at least one study"));
        }
        if let Some(bad) = z_scores.iter().find(|z| !z.is_finite()) {
            return Err(Error::domain(format!("non-finite z-score: {bad}")));
        }
        Ok(Self { z_scores })
    }

    /// Build from (effect, standard error) pairs, Zᵢ = θ̂ᵢ/sᵢ.
    pub fn from_effects(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut z_scores = Vec::with_capacity(pairs.len());
        for (i, &(effect, se)) in pairs.iter().enumerate() {
            if !effect.is_finite() {
                return Err(Error::domain(format!(
                    "study {}: effect must be finite, got {effect}",
                    i + 1
                )));
            }
            if !(se > 0.0 && se.is_finite()) {
                return Err(Error::domain(format!(
                    "study {}: standard error must be finite and > 0, got {se}",
                    i + 1
                )));
            }
            z_scores.push(effect / se);
        }
        Self::from_z_scores(z_scores)
    }

    /// Number of studies k.
    pub fn k(&self) -> usize {
        self.z_scores.len()
    }

    pub fn z_scores(&self) -> &[f64] {
        &self.z_scores
    }

    /// ΣZᵢ, summed in a canonical order so that permuting the studies gives
    /// a bit-identical result.
    pub fn z_sum(&self) -> f64 {
        let mut sorted = self.z_scores.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        sorted.iter().sum()
    }

    /// Stouffer's pooled test: Z_S = ΣZᵢ/√k with its one-tailed p-value.
    pub fn stouffer(&self) -> StoufferTest {
        let z = self.z_sum() / (self.k() as f64).sqrt();
        StoufferTest {
            z,
            p_one_tailed: std_normal_sf(z),
        }
    }

    /// Rosenthal's fail-safe number at one-tailed level `alpha`.
    ///
    /// `alpha` must lie in (0, 0.5) so that Z_α > 0 and the defining
    /// equation has a meaningful positive root.
    pub fn fail_safe_n(&self, alpha: f64) -> Result<FailSafeReport> {
        let z_alpha = critical_value(alpha)?;
        let k = self.k();
        let sum = self.z_sum();
        let n_r_raw = sum * sum / (z_alpha * z_alpha) - k as f64;
        let stouffer = self.stouffer();
        let threshold = rosenthal_threshold(k);
        Ok(FailSafeReport {
            k,
            alpha,
            z_alpha,
            stouffer_z: stouffer.z,
            stouffer_p: stouffer.p_one_tailed,
            n_r_raw,
            n_r_reported: n_r_raw.max(0.0),
            threshold,
            minimal_bias: n_r_raw > threshold,
        })
    }
}

/// Stouffer's Z and one-tailed p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StoufferTest {
    pub z: f64,
    pub p_one_tailed: f64,
}

/// Everything the fail-safe computation reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailSafeReport {
    /// Number of observed studies.
    pub k: usize,
    /// One-tailed significance level used.
    pub alpha: f64,
    /// One-tailed critical value Z_α = Φ⁻¹(1 − α).
    pub z_alpha: f64,
    /// Stouffer's pooled Z.
    pub stouffer_z: f64,
    /// One-tailed p-value of the pooled Z.
    pub stouffer_p: f64,
    /// (ΣZᵢ)²/Z_α² − k; negative when the pooled effect is not significant.
    pub n_r_raw: f64,
    /// Raw value clamped at zero, the number actually quoted.
    pub n_r_reported: f64,
    /// Rosenthal's rule-of-thumb tolerance 5k + 10.
    pub threshold: f64,
    /// True when the raw value clears the threshold.
    pub minimal_bias: bool,
}

/// Rosenthal's 5k + 10 tolerance for k studies.
pub fn rosenthal_threshold(k: usize) -> f64 {
    (5 * k + 10) as f64
}

/// One-tailed critical value Z_α; alpha restricted to (0, 0.5) so it is
/// strictly positive.
pub(crate) fn critical_value(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 0.5), got {alpha}"
        )));
    }
    std_normal_quantile(1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn stouffer_null_case() {
        let s = StudySet::from_z_scores(vec![0.0; 4]).unwrap();
        let t = s.stouffer();
        assert_eq!(t.z, 0.0);
        assert_eq!(t.p_one_tailed, 0.5);
    }

    #[test]
    fn stouffer_hand_example() {
        // sum 7, sqrt(4) = 2
        let s = StudySet::from_z_scores(vec![1.5, 2.0, 1.0, 2.5]).unwrap();
        let t = s.stouffer();
        assert_eq!(t.z, 3.5);
        close(t.p_one_tailed, 2.3262907903552504e-4, 1e-17);
    }

    #[test]
    fn fail_safe_hand_example() {
        let s = StudySet::from_z_scores(vec![1.5, 2.0, 1.0, 2.5]).unwrap();
        let r = s.fail_safe_n(0.05).unwrap();
        close(r.n_r_raw, 14.110963963941549, 1e-11);
        assert_eq!(r.n_r_reported, r.n_r_raw);
        assert_eq!(r.threshold, 30.0);
        assert!(!r.minimal_bias);
    }

    #[test]
    fn all_null_studies_give_minus_k() {
        for k in [1usize, 3, 10] {
            let s = StudySet::from_z_scores(vec![0.0; k]).unwrap();
            let r = s.fail_safe_n(0.05).unwrap();
            assert_eq!(r.n_r_raw, -(k as f64));
            assert_eq!(r.n_r_reported, 0.0);
        }
    }

    #[test]
    fn alpha_domain() {
        let s = StudySet::from_z_scores(vec![1.0]).unwrap();
        for alpha in [0.0, 0.5, 0.7, -0.1, f64::NAN] {
            assert!(s.fail_safe_n(alpha).is_err(), "alpha={alpha}");
        }
        assert!(s.fail_safe_n(0.4999).is_ok());
    }

    #[test]
    fn empty_and_invalid_inputs() {
        assert!(StudySet::from_z_scores(vec![]).is_err());
        assert!(StudySet::from_z_scores(vec![1.0, f64::NAN]).is_err());
        assert!(StudySet::from_effects(&[(1.0, 0.0)]).is_err());
        assert!(StudySet::from_effects(&[(1.0, -2.0)]).is_err());
        let s = StudySet::from_effects(&[(2.0, 0.5)]).unwrap();
        assert_eq!(s.z_scores(), &[4.0]);
    }

    #[test]
    fn threshold_boundary_ulps() {
        // put n_r_raw a hair above/below 5k+10 via a single crafted z-score
        let k = 1usize;
        let t = rosenthal_threshold(k);
        let za = critical_value(0.05).unwrap();
        let s_exact = za * (t + k as f64).sqrt();
        for (bump, expect) in [(1.0 + 1e-12, true), (1.0 - 1e-12, false)] {
            let s = StudySet::from_z_scores(vec![s_exact * bump]).unwrap();
            let r = s.fail_safe_n(0.05).unwrap();
            assert_eq!(r.minimal_bias, expect, "bump={bump} raw={}", r.n_r_raw);
        }
    }

    proptest! {
        #[test]
        fn permutation_invariance(mut z in proptest::collection::vec(-5.0f64..5.0, 1..12)) {
            let a = StudySet::from_z_scores(z.clone()).unwrap().fail_safe_n(0.05).unwrap();
            z.reverse();
            let b = StudySet::from_z_scores(z).unwrap().fail_safe_n(0.05).unwrap();
            prop_assert_eq!(a.n_r_raw, b.n_r_raw);
            prop_assert_eq!(a.stouffer_z, b.stouffer_z);
        }

        #[test]
        fn appending_null_study_decrements(z in proptest::collection::vec(-5.0f64..5.0, 1..12)) {
            let before = StudySet::from_z_scores(z.clone()).unwrap().fail_safe_n(0.05).unwrap();
            let mut z2 = z;
            z2.push(0.0);
            let after = StudySet::from_z_scores(z2).unwrap().fail_safe_n(0.05).unwrap();
            prop_assert!((after.n_r_raw - (before.n_r_raw - 1.0)).abs() < 1e-9);
        }

        #[test]
        fn smaller_alpha_shrinks_raw(z in proptest::collection::vec(0.01f64..5.0, 1..12)) {
            let s = StudySet::from_z_scores(z).unwrap();
            let tight = s.fail_safe_n(0.01).unwrap();
            let loose = s.fail_safe_n(0.05).unwrap();
            prop_assert!(tight.n_r_raw < loose.n_r_raw);
        }
    }
}
