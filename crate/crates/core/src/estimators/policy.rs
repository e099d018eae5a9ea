use log::warn;

use crate::error::{domain, Result};
use crate::levy::MarketModel;

/// How the error scale `v_ε` is tied to `σ(ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VEpsRule {
    /// `v_ε = σ(ε)`.
    Sigma,
    /// `v_ε = σ(ε)^{1-η/2}`.
    SigmaPower(f64),
}

/// Sample sizes for a cut-off `ε` and Romberg exponent `β`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSizePolicy {
    pub eps: f64,
    pub beta: f64,
    pub rule: VEpsRule,
    pub v_eps: f64,
    /// `σ²(ε)` and `σ²(ε^β)` summed over components.
    pub sigma_sq_eps: f64,
    pub sigma_sq_coarse: f64,
    pub n: u64,
    pub n1: u64,
    pub n2: u64,
    /// Complexity-optimal exponent `Y/2` (largest `Y` across components).
    pub beta_star: f64,
}

/// `N = N₁ = ⌈v_ε^{-2}⌉` and `N₂ = ⌈v_ε^{-2} σ²(ε^β)⌉`.
///
/// `beta = 1` is accepted as the degenerate case of an empty band.
pub fn make_policy(model: &MarketModel, eps: f64, beta: f64, rule: VEpsRule) -> Result<SampleSizePolicy> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("cut-off must lie in (0, 1), got {eps}"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("Romberg exponent must lie in (0, 1], got {beta}"));
    }
    let sigma_sq_eps = model.sigma_sq(eps)?;
    let sigma_sq_coarse = model.sigma_sq(eps.powf(beta))?;
    let sigma = sigma_sq_eps.sqrt();
    let v_eps = match rule {
        VEpsRule::Sigma => sigma,
        VEpsRule::SigmaPower(eta) => {
            if !(0.0..2.0).contains(&eta) {
                return domain(format!("η must lie in [0, 2), got {eta}"));
            }
            sigma.powf(1.0 - eta / 2.0)
        }
    };
    let inv = v_eps.powi(-2);
    let n = inv.ceil() as u64;
    let n2 = (inv * sigma_sq_coarse).ceil() as u64;
    let coarse_sigma = sigma_sq_coarse.sqrt();
    if !(sigma / coarse_sigma < 1.0 && v_eps / coarse_sigma < 1.0) {
        warn!(
            "sample-size policy at eps={eps}, beta={beta}: σ(ε)/σ(ε^β) = {:.3}, v_ε/σ(ε^β) = {:.3}; expected both below 1",
            sigma / coarse_sigma,
            v_eps / coarse_sigma
        );
    }
    let ymax = model.components().iter().map(|p| p.y()).fold(f64::MIN, f64::max);
    Ok(SampleSizePolicy {
        eps,
        beta,
        rule,
        v_eps,
        sigma_sq_eps,
        sigma_sq_coarse,
        n,
        n1: n,
        n2: n2.max(1),
        beta_star: ymax / 2.0,
    })
}

impl SampleSizePolicy {
    /// Overrides the derived counts.
    pub fn with_counts(mut self, n: u64, n1: u64, n2: u64) -> Self {
        self.n = n;
        self.n1 = n1;
        self.n2 = n2;
        self
    }

    /// Multiplies every count by `factor`, keeping at least two samples per level.
    pub fn scaled(self, factor: f64) -> Self {
        let s = |k: u64| ((k as f64 * factor).ceil() as u64).max(2);
        let (n, n1, n2) = (s(self.n), s(self.n1), s(self.n2));
        self.with_counts(n, n1, n2)
    }

    pub fn coarse_eps(&self) -> f64 {
        self.eps.powf(self.beta)
    }
}
