//! Rosenthal's fail-safe number and the distribution of its estimator.
//!
//! The fail-safe number is the count of hypothetical unpublished null-result
//! studies needed to drag a meta-analysis's pooled significance down to a
//! chosen level. This crate computes the estimator from study data and, under
//! the assumption that per-study Z-scores are half-normal, provides its
//! sampling distribution in two closed forms (a left-truncated-normal route
//! and a folded-normal route), each with pdf, cdf, quantile, moments and
//! characteristic function.
//!
//! Module map:
//!
//! * [`normal`] — standard-normal, half-normal, folded-normal and
//!   left-truncated-normal primitives plus a seeded sampler.
//! * [`estimator`] — study sets, Stouffer's pooled Z and the fail-safe
//!   number report.
//! * [`dist`] — the two exact laws of the estimator.
//! * [`montecarlo`] — deterministic, parallel simulation of half-normal sums
//!   and estimator draws, histograms, Kolmogorov–Smirnov statistics.
//! * [`convergence`] — error-vs-k sweeps and the log-log least-squares fit.
//! * [`quad`] — adaptive quadrature used by the verification suites.
//!
//! ```
//! use failsafe_core::{Approach, NrDistribution, StudySet, SumParams};
//!
//! // the report for four observed studies
//! let studies = StudySet::from_z_scores(vec![1.5, 2.0, 1.0, 2.5])?;
//! let report = studies.fail_safe_n(0.05)?;
//! assert!((report.n_r_raw - 14.110963963941549).abs() < 1e-9);
//! assert!(!report.minimal_bias); // well under the 5k + 10 tolerance
//!
//! // the sampling distribution of the estimator at k = 15
//! let law = NrDistribution::new(Approach::Folded, SumParams::new(15, 0.05)?);
//! let m = law.moments();
//! assert!((m.mean - 39.96).abs() < 0.01);
//! assert!((law.cdf(law.quantile(0.9)?) - 0.9).abs() < 1e-8);
//! # Ok::<(), failsafe_core::Error>(())
//! ```

pub mod convergence;
pub mod dist;
pub mod error;
pub mod estimator;
pub mod montecarlo;
pub mod normal;
pub mod quad;

mod cerf;
mod erf;

pub use dist::{Approach, CfIntermediates, NrDistribution, NrMoments, SumParams};
pub use error::{Error, Result};
pub use estimator::{FailSafeReport, StoufferTest, StudySet};
