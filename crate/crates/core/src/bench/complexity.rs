//! Cost analytics for single-level and Romberg estimators.

use crate::error::{domain, Result};
use crate::levy::MarketModel;

/// Asymptotic cost comparison for a single activity index `Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexityModel {
    y: f64,
    beta: f64,
    eps: f64,
}

impl ComplexityModel {
    pub fn new(y: f64, beta: f64, eps: f64) -> Result<Self> {
        if !(y > 0.0 && y < 2.0) {
            return domain(format!("activity index must lie in (0, 2), got {y}"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return domain(format!("Romberg exponent must lie in (0, 1), got {beta}"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return domain(format!("cut-off must lie in (0, 1), got {eps}"));
        }
        Ok(Self { y, beta, eps })
    }

    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `(Y(1-β), β(2-Y))`: orders of the coarse-level and correction costs
    /// relative to plain Monte Carlo.
    pub fn exponents(&self) -> (f64, f64) {
        (self.y * (1.0 - self.beta), self.beta * (2.0 - self.y))
    }

    /// `C_SR / C_MC ≈ ε^{Y(1-β)} + Y/(2-Y) ε^{β(2-Y)}`.
    pub fn ratio(&self) -> f64 {
        let (a, b) = self.exponents();
        self.eps.powf(a) + self.y / (2.0 - self.y) * self.eps.powf(b)
    }

    /// The ratio behaves like `ε^order`.
    pub fn order(&self) -> f64 {
        let (a, b) = self.exponents();
        a.min(b)
    }

    /// `Y(Y/2 - 1)`, the exponent of the ratio at the optimal `β`, i.e.
    /// `C_SR / C_MC ~ ε^{-gain_exponent}`.
    pub fn gain_exponent(&self) -> f64 {
        self.y * (self.y / 2.0 - 1.0)
    }
}

/// `β` equalising both exponents.
pub fn optimal_beta(y: f64) -> f64 {
    y / 2.0
}

pub fn complexity_ratio(y: f64, beta: f64, eps: f64) -> Result<f64> {
    Ok(ComplexityModel::new(y, beta, eps)?.ratio())
}

/// Expected jump proposals per path at cut-off `eps`, `𝒦(ε)`.
pub fn proposals_per_path(model: &MarketModel, eps: f64) -> f64 {
    model.maturity() * model.components().iter().map(|p| 2.0 * p.proposal_intensity(eps)).sum::<f64>()
}

/// Predicted proposal counts of plain and Romberg Monte Carlo with
/// `v_ε = σ(ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostPrediction {
    pub eps: f64,
    pub beta: f64,
    /// `𝒦(ε) σ⁻²(ε)`.
    pub mc: f64,
    /// `(𝒦(ε^β) + 𝒦(ε) σ²(ε^β)) σ⁻²(ε)`.
    pub sr: f64,
}

impl CostPrediction {
    pub fn ratio(&self) -> f64 {
        self.sr / self.mc
    }
}

pub fn predicted_costs(model: &MarketModel, eps: f64, beta: f64) -> Result<CostPrediction> {
    let s_eps = model.sigma_sq(eps)?;
    let coarse = eps.powf(beta);
    let s_coarse = model.sigma_sq(coarse)?;
    let k_eps = proposals_per_path(model, eps);
    Ok(CostPrediction {
        eps,
        beta,
        mc: k_eps / s_eps,
        sr: (proposals_per_path(model, coarse) + k_eps * s_coarse) / s_eps,
    })
}
