//! The two exact sampling distributions of the fail-safe estimator.
//!
//! With per-study Z-scores half-normal, their sum S is asymptotically
//! N(μ, σ²) with μ = k√(2/π) and σ² = k(1 − 2/π). The estimator
//! N̂ = S²/Z_α² − k then inherits one of two laws depending on how the sign
//! ambiguity in S = ±Z_α√(N̂+k) is resolved:
//!
//! * **Truncated**: S is conditioned on S ≥ Z_α√k, so N̂ lives on [0, ∞).
//! * **Folded**: S is folded about zero, so N̂ lives on (−k, ∞) with an
//!   integrable 1/√(n+k) singularity at the left edge.
//!
//! Both come with density, distribution function, quantile, moments and
//! characteristic function. The two densities agree asymptotically in k.

use crate::cerf::std_normal_cdf_cplx;
use crate::error::{Error, Result};
use crate::estimator::critical_value;
use crate::normal::{
    mills_ratio, std_normal_cdf, ONE_MINUS_2_OVER_PI, SQRT_2_OVER_PI,
};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Which resolution of the sign ambiguity the distribution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// S restricted to S ≥ Z_α√k; support [0, ∞).
    Truncated,
    /// S folded about zero; support (−k, ∞).
    Folded,
}

/// Shared parameterization of the sum S and everything derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumParams {
    k: usize,
    alpha: f64,
    z_alpha: f64,
    mu: f64,
    sigma_sq: f64,
    lambda: f64,
}

impl SumParams {
    /// Parameters for `k ≥ 1` studies at one-tailed level `alpha ∈ (0, 0.5)`.
    pub fn new(k: usize, alpha: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k must be at least 1"));
        }
        let z_alpha = critical_value(alpha)?;
        let kf = k as f64;
        let mu = kf * SQRT_2_OVER_PI;
        let sigma_sq = kf * ONE_MINUS_2_OVER_PI;
        let lambda = (mu - z_alpha * kf.sqrt()) / sigma_sq.sqrt();
        Ok(Self {
            k,
            alpha,
            z_alpha,
            mu,
            sigma_sq,
            lambda,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// One-tailed critical value Z_α.
    pub fn z_alpha(&self) -> f64 {
        self.z_alpha
    }

    /// μ = k√(2/π), the asymptotic mean of S.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// σ² = k(1 − 2/π), the asymptotic variance of S.
    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }

    /// λ = (μ − Z_α√k)/σ, the standardized distance of the cut from μ.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The truncation point Z_α√k in S-space.
    pub fn cut(&self) -> f64 {
        self.z_alpha * (self.k as f64).sqrt()
    }
}

/// Moments of one of the two laws; the truncation corrections ε and δ are
/// zero under the folded approach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NrMoments {
    pub mean: f64,
    pub variance: f64,
    /// Mean correction from truncation, always ≥ 0.
    pub epsilon: f64,
    /// Variance correction from truncation.
    pub delta: f64,
}

/// One of the two exact laws of the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NrDistribution {
    approach: Approach,
    params: SumParams,
}

impl NrDistribution {
    pub fn new(approach: Approach, params: SumParams) -> Self {
        Self { approach, params }
    }

    pub fn truncated(params: SumParams) -> Self {
        Self::new(Approach::Truncated, params)
    }

    pub fn folded(params: SumParams) -> Self {
        Self::new(Approach::Folded, params)
    }

    pub fn approach(&self) -> Approach {
        self.approach
    }

    pub fn params(&self) -> &SumParams {
        &self.params
    }

    /// Infimum of the support: 0 when truncated, −k when folded (open).
    pub fn support_lower(&self) -> f64 {
        match self.approach {
            Approach::Truncated => 0.0,
            Approach::Folded => -(self.params.k as f64),
        }
    }

    /// Density at `n_r`. Zero outside the support; the folded approach
    /// signals an error exactly at its singular edge `n_r = -k`.
    pub fn pdf(&self, n_r: f64) -> Result<f64> {
        let p = &self.params;
        match self.approach {
            Approach::Truncated => {
                Ok(asymptotic_pdf(n_r, p) / std_normal_cdf(p.lambda))
            }
            Approach::Folded => {
                let edge = -(p.k as f64);
                if n_r < edge {
                    return Ok(0.0);
                }
                if n_r == edge {
                    return Err(Error::SingularAtSupportEdge(edge));
                }
                let shifted = n_r + p.k as f64;
                let s = p.z_alpha * shifted.sqrt();
                let scale = p.z_alpha / (2.0 * (2.0 * PI * p.sigma_sq * shifted).sqrt());
                let twice_var = 2.0 * p.sigma_sq;
                Ok(scale
                    * ((-(s - p.mu).powi(2) / twice_var).exp()
                        + (-(s + p.mu).powi(2) / twice_var).exp()))
            }
        }
    }

    /// Distribution function, clamped to [0, 1].
    pub fn cdf(&self, n_r: f64) -> f64 {
        let p = &self.params;
        let sigma = p.sigma();
        match self.approach {
            Approach::Truncated => {
                if n_r < 0.0 {
                    return 0.0;
                }
                let s = p.z_alpha * (n_r + p.k as f64).sqrt();
                let phi_lambda = std_normal_cdf(p.lambda);
                let raw = (std_normal_cdf((s - p.mu) / sigma)
                    - std_normal_cdf((p.cut() - p.mu) / sigma))
                    / phi_lambda;
                raw.clamp(0.0, 1.0)
            }
            Approach::Folded => {
                let shifted = n_r + p.k as f64;
                if shifted <= 0.0 {
                    return 0.0;
                }
                let s = p.z_alpha * shifted.sqrt();
                let raw = std_normal_cdf((s - p.mu) / sigma)
                    - std_normal_cdf((-s - p.mu) / sigma);
                raw.clamp(0.0, 1.0)
            }
        }
    }

    /// Quantile by monotone bisection on [`Self::cdf`]; the returned point
    /// satisfies `cdf(x) = p` well within 1e-8.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile requires p in (0, 1), got {p}"
            )));
        }
        let m = self.moments();
        let mut lo = self.support_lower();
        let mut hi = (m.mean + 10.0 * m.variance.sqrt()).max(lo + 1.0);
        let mut grow = 0;
        while self.cdf(hi) < p && grow < 200 {
            hi = lo + 2.0 * (hi - lo);
            grow += 1;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Closed-form mean and variance.
    ///
    /// Folded: E = (μ² + σ²)/Z_α² − k, Var = 2σ²(2μ² + σ²)/Z_α⁴.
    /// Truncated adds the corrections
    /// ε = h·σ(μ + Z_α√k)/Z_α² and
    /// δ = h·[σ³(3μ + Z_α√k) − (h + λ)σ²(μ + Z_α√k)²]/Z_α⁴,
    /// with h = φ(λ)/Φ(λ), both validated against quadrature of the density.
    pub fn moments(&self) -> NrMoments {
        let p = &self.params;
        let za2 = p.z_alpha * p.z_alpha;
        let mean_folded = (p.mu * p.mu + p.sigma_sq) / za2 - p.k as f64;
        let var_folded = 2.0 * p.sigma_sq * (2.0 * p.mu * p.mu + p.sigma_sq) / (za2 * za2);
        match self.approach {
            Approach::Folded => NrMoments {
                mean: mean_folded,
                variance: var_folded,
                epsilon: 0.0,
                delta: 0.0,
            },
            Approach::Truncated => {
                let h = mills_ratio(p.lambda);
                let sigma = p.sigma();
                let reach = p.mu + p.cut();
                let epsilon = h * sigma * reach / za2;
                let delta = h
                    * (sigma * p.sigma_sq * (3.0 * p.mu + p.cut())
                        - (h + p.lambda) * p.sigma_sq * reach * reach)
                    / (za2 * za2);
                NrMoments {
                    mean: mean_folded + epsilon,
                    variance: var_folded + delta,
                    epsilon,
                    delta,
                }
            }
        }
    }

    /// Characteristic function E[exp(itN̂)].
    ///
    /// Folded: Z_α·exp(μ²it/(Z_α² − 2σ²it) − kit)/(Z_α² − 2σ²it)^½.
    /// Truncated multiplies that by Φ((μ₁ + λ)/σ₁)/Φ(λ) with the complex
    /// intermediates of [`CfIntermediates`]. Square roots take the principal
    /// branch; at t = 0 both return exactly 1.
    pub fn cf(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let p = &self.params;
        let inter = CfIntermediates::new(t, p);
        let it = Complex64::new(0.0, t);
        let base = p.z_alpha * (it * p.mu * p.mu / inter.denom - it * p.k as f64).exp()
            / inter.denom.sqrt();
        match self.approach {
            Approach::Folded => base,
            Approach::Truncated => {
                let sigma1 = inter.sigma1_sq.sqrt();
                let ratio = std_normal_cdf_cplx((inter.mu1 + p.lambda) / sigma1)
                    / std_normal_cdf(p.lambda);
                ratio * base
            }
        }
    }
}

/// Intermediates of the truncated-approach characteristic function:
/// μ₁ = 2μσit/(Z_α² − 2σ²it) and σ₁² = Z_α²/(Z_α² − 2σ²it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfIntermediates {
    pub t: f64,
    pub mu1: Complex64,
    pub sigma1_sq: Complex64,
    denom: Complex64,
}

impl CfIntermediates {
    pub fn new(t: f64, params: &SumParams) -> Self {
        let denom = Complex64::new(params.z_alpha * params.z_alpha, -2.0 * params.sigma_sq * t);
        let mu1 = Complex64::new(0.0, 2.0 * params.mu * params.sigma() * t) / denom;
        let sigma1_sq = Complex64::new(params.z_alpha * params.z_alpha, 0.0) / denom;
        Self {
            t,
            mu1,
            sigma1_sq,
            denom,
        }
    }
}

/// Large-k simplification of the truncated density: the Φ(λ) normalizer
/// dropped, i.e. exactly `truncated pdf × Φ(λ)`. Zero below n_r = 0.
pub fn asymptotic_pdf(n_r: f64, params: &SumParams) -> f64 {
    if n_r < 0.0 {
        return 0.0;
    }
    let shifted = n_r + params.k as f64;
    let s = params.z_alpha * shifted.sqrt();
    params.z_alpha / (2.0 * (2.0 * PI * params.sigma_sq * shifted).sqrt())
        * (-(s - params.mu).powi(2) / (2.0 * params.sigma_sq)).exp()
}
