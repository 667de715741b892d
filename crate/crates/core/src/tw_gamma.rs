//! Shifted-gamma surrogate for the Tracy–Widom laws, TW_β ≈ Γ(k, θ) − α, and
//! the centering and scaling maps that turn it into an approximate law of
//! the largest eigenvalue.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::roots::{invert_cdf, Bracketing, QUANTILE_TOL};
use crate::specfun::{ln_gamma_prefactor, p_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaApproxParams {
    pub k: f64,
    pub theta: f64,
    pub alpha_shift: f64,
}

/// Mean, standard deviation and skewness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwMoments {
    pub mu: f64,
    pub sigma: f64,
    pub skew: f64,
}

impl GammaApproxParams {
    pub fn moments(&self) -> TwMoments {
        TwMoments {
            mu: self.k * self.theta - self.alpha_shift,
            sigma: self.k.sqrt() * self.theta,
            skew: 2.0 / self.k.sqrt(),
        }
    }

    /// P(k, (x + α)/θ), identically 0 for x ≤ −α.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let z = (x + self.alpha_shift) / self.theta;
        if z <= 0.0 {
            0.0
        } else {
            p_unchecked(self.k, z)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x + self.alpha_shift) / self.theta;
        if !(z > 0.0) || z.is_infinite() {
            return 0.0;
        }
        // z^{k-1} e^{-z} / (Γ(k) θ)
        (ln_gamma_prefactor(self.k, z) - z.ln()).exp() / self.theta
    }
}

/// Fitted constants (k, θ, α) for β = 1, 2, 4.
pub fn params_for(beta: u32) -> Result<GammaApproxParams> {
    let (k, theta, alpha_shift) = match beta {
        1 => (46.446, 0.186054, 9.84801),
        2 => (79.6595, 0.101037, 9.81961),
        4 => (146.021, 0.0595445, 11.0016),
        _ => return Err(Error::domain(format!("beta must be 1, 2 or 4, got {beta}"))),
    };
    Ok(GammaApproxParams { k, theta, alpha_shift })
}

/// Gamma parameters sharing the first three moments with (μ, σ, S).
pub fn match_moments(mu: f64, sigma: f64, skew: f64) -> Result<GammaApproxParams> {
    if !(sigma > 0.0) || !(skew > 0.0) || !mu.is_finite() || sigma.is_infinite() || skew.is_infinite() {
        return Err(Error::domain(format!(
            "moment matching needs finite mu and positive sigma, skew; got ({mu}, {sigma}, {skew})"
        )));
    }
    let k = 4.0 / (skew * skew);
    let theta = sigma * skew / 2.0;
    Ok(GammaApproxParams { k, theta, alpha_shift: k * theta - mu })
}

pub fn tw_cdf(beta: u32, x: f64) -> Result<f64> {
    Ok(params_for(beta)?.cdf(x))
}

pub fn tw_pdf(beta: u32, x: f64) -> Result<f64> {
    Ok(params_for(beta)?.pdf(x))
}

/// Affine map λ₁ ↦ (λ₁ − μ_c)/σ_c onto the Tracy–Widom scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringParams {
    pub mu_c: f64,
    pub sigma_c: f64,
    pub a1: f64,
    pub a2: f64,
}

/// μ = (√(n+a₁) + √(p+a₂))², σ = √μ (1/√(n+a₁) + 1/√(p+a₂))^{1/3}, with
/// a₁ = a₂ = −½ for real (β = 1) and 0 for complex (β = 2) Wishart matrices.
pub fn centering_wishart(n: usize, p: usize, beta: u32) -> Result<CenteringParams> {
    let adj = match beta {
        1 => -0.5,
        2 => 0.0,
        _ => return Err(Error::domain(format!("Wishart centering needs beta 1 or 2, got {beta}"))),
    };
    let (rn, rp) = (n as f64 + adj, p as f64 + adj);
    if !(rn > 0.0 && rp > 0.0) {
        return Err(Error::domain(format!("Wishart centering undefined for dims ({n}, {p})")));
    }
    let (sn, sp) = (rn.sqrt(), rp.sqrt());
    let mu_c = (sn + sp).powi(2);
    let sigma_c = mu_c.sqrt() * (1.0 / sn + 1.0 / sp).cbrt();
    Ok(CenteringParams { mu_c, sigma_c, a1: adj, a2: adj })
}

/// μ′ = 2σ₀√(n − a₁), σ′ = σ₀(n − a₂)^{−1/6}, σ₀ = 1/√2. GOE uses
/// a₁ = ½ + (n − ½)^{−1/3}/10, a₂ = 0; GUE uses a₁ = 0, a₂ = 1, which leaves
/// n = 1 undefined.
pub fn centering_gaussian(n: usize, beta: u32) -> Result<CenteringParams> {
    let nf = n as f64;
    let (a1, a2) = match beta {
        1 if n >= 1 => (0.5 + 0.1 * (nf - 0.5).cbrt().recip(), 0.0),
        2 => (0.0, 1.0),
        1 => return Err(Error::domain("GOE centering needs n ≥ 1")),
        _ => return Err(Error::domain(format!("Gaussian-ensemble centering needs beta 1 or 2, got {beta}"))),
    };
    if !(nf > a1 && nf > a2) {
        return Err(Error::domain(format!("centering undefined for n = {n} with a1 = {a1}, a2 = {a2}")));
    }
    let sigma0 = std::f64::consts::FRAC_1_SQRT_2;
    Ok(CenteringParams {
        mu_c: 2.0 * sigma0 * (nf - a1).sqrt(),
        sigma_c: sigma0 * (nf - a2).powf(-1.0 / 6.0),
        a1,
        a2,
    })
}

/// Centering and surrogate parameters for an ensemble.
pub fn surrogate(ensemble: &EnsembleSpec) -> Result<(CenteringParams, GammaApproxParams)> {
    ensemble.validate()?;
    let beta = ensemble.beta();
    let c = match *ensemble {
        EnsembleSpec::WishartReal { n_min, n_max } | EnsembleSpec::WishartComplex { n_min, n_max } => {
            centering_wishart(n_max, n_min, beta)?
        }
        EnsembleSpec::Goe { n } | EnsembleSpec::Gue { n } => centering_gaussian(n, beta)?,
    };
    Ok((c, params_for(beta)?))
}

pub fn approx_cdf_largest(ensemble: &EnsembleSpec, x: f64) -> Result<f64> {
    let (c, g) = surrogate(ensemble)?;
    Ok(g.cdf((x - c.mu_c) / c.sigma_c))
}

pub fn approx_pdf_largest(ensemble: &EnsembleSpec, x: f64) -> Result<f64> {
    let (c, g) = surrogate(ensemble)?;
    Ok(g.pdf((x - c.mu_c) / c.sigma_c) / c.sigma_c)
}

/// Left end of the surrogate's support, μ_c − σ_c α.
pub fn approx_support_min(ensemble: &EnsembleSpec) -> Result<f64> {
    let (c, g) = surrogate(ensemble)?;
    Ok(c.mu_c - c.sigma_c * g.alpha_shift)
}

pub fn approx_quantile_largest(ensemble: &EnsembleSpec, p: f64) -> Result<f64> {
    let (c, g) = surrogate(ensemble)?;
    let br = Bracketing { start: c.mu_c, step: c.sigma_c, support_min: Some(c.mu_c - c.sigma_c * g.alpha_shift) };
    invert_cdf(|x| Ok(g.cdf((x - c.mu_c) / c.sigma_c)), p, br, QUANTILE_TOL)
}
