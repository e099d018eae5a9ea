//! Estimator run files.
//!
//! ```toml
//! method = "ISSR"            # MC | SR | ISMC | ISSR
//! eps = 1e-3
//! beta = 0.64725             # default: Y/2 of the most active component
//! v_eps_rule = "sigma"       # or "sigma_power" together with eta
//! theta_mode = "adaptive"    # zero | constant | adaptive
//! seed = 42
//!
//! [payoff]
//! strike = 100.0
//! ```
//!
//! `theta_mode = "constant"` reads `theta` (and `theta2` for the Romberg
//! correction, defaulting to `theta`). Optional keys: `eta`, `n`, `n1`, `n2`,
//! `sample_scale`, `weight_cumulant = "truncated" | "full"` and an
//! `[adaptive]` table with `g0`, `n0`, `margin`.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use super::driver::{ConstantTilt, TiltDriver, WeightCumulant};
use super::payoff::{CallOnSum, Payoff};
use super::policy::{make_policy, SampleSizePolicy, VEpsRule};
use super::report::{EstimatorReport, Method};
use super::run::{ismc_estimate, issr_estimate, lane, mc_estimate, sr_estimate, ROLE_DRIVER1, ROLE_DRIVER2};
use crate::adaptive::{AdaptiveTilt, GainSchedule, ProjectionBox, Target, VarianceObjective};
use crate::error::{LevyError, Result};
use crate::levy::MarketModel;
use crate::sampler::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub enum ThetaMode {
    Zero,
    /// Tilt for the single-level sum (and the coarse sum of ISSR), then the
    /// tilt for the Romberg correction.
    Constant(Vec<f64>, Vec<f64>),
    Adaptive,
}

/// Robbins–Monro settings for adaptive tilts.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptiveSettings {
    pub g0: f64,
    pub n0: f64,
    /// Distance kept from the edge of Θ₁.
    pub margin: f64,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        let g = GainSchedule::default();
        Self { g0: g.g0, n0: g.n0, margin: 1e-2 }
    }
}

impl AdaptiveSettings {
    pub fn gain(&self) -> Result<GainSchedule> {
        GainSchedule::new(self.g0, self.n0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub method: Method,
    pub eps: f64,
    /// `None` picks `Y/2`.
    pub beta: Option<f64>,
    pub rule: VEpsRule,
    pub theta_mode: ThetaMode,
    pub seed: u64,
    pub weight: WeightCumulant,
    pub adaptive: AdaptiveSettings,
    pub strike: f64,
    /// Explicit `(N, N₁, N₂)`, replacing the derived counts.
    pub counts: Option<(u64, u64, u64)>,
    /// Multiplier applied to the derived counts.
    pub sample_scale: f64,
}

impl EstimatorConfig {
    pub fn new(method: Method, eps: f64, strike: f64, seed: u64) -> Self {
        Self {
            method,
            eps,
            beta: None,
            rule: VEpsRule::Sigma,
            theta_mode: ThetaMode::Zero,
            seed,
            weight: WeightCumulant::Truncated,
            adaptive: AdaptiveSettings::default(),
            strike,
            counts: None,
            sample_scale: 1.0,
        }
    }

    pub fn beta_for(&self, model: &MarketModel) -> f64 {
        self.beta.unwrap_or_else(|| model.components().iter().map(|p| p.y()).fold(f64::MIN, f64::max) / 2.0)
    }

    pub fn policy(&self, model: &MarketModel) -> Result<SampleSizePolicy> {
        let p = make_policy(model, self.eps, self.beta_for(model), self.rule)?;
        let p = if self.sample_scale != 1.0 { p.scaled(self.sample_scale) } else { p };
        Ok(match self.counts {
            Some((n, n1, n2)) => p.with_counts(n, n1, n2),
            None => p,
        })
    }

    pub fn payoff(&self, model: &MarketModel) -> Arc<dyn Payoff> {
        Arc::new(CallOnSum::new(self.strike, model))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    method: String,
    eps: f64,
    beta: Option<f64>,
    #[serde(default = "default_rule")]
    v_eps_rule: String,
    eta: Option<f64>,
    #[serde(default = "default_mode")]
    theta_mode: String,
    theta: Option<Vec<f64>>,
    theta2: Option<Vec<f64>>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_weight")]
    weight_cumulant: String,
    n: Option<u64>,
    n1: Option<u64>,
    n2: Option<u64>,
    #[serde(default = "one")]
    sample_scale: f64,
    payoff: RawPayoff,
    #[serde(default)]
    adaptive: AdaptiveSettings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPayoff {
    strike: f64,
}

fn default_rule() -> String {
    "sigma".into()
}
fn default_mode() -> String {
    "zero".into()
}
fn default_weight() -> String {
    "truncated".into()
}
fn one() -> f64 {
    1.0
}

fn config_err<T>(msg: String) -> Result<T> {
    Err(LevyError::Config(msg))
}

pub fn parse_estimator(text: &str) -> Result<EstimatorConfig> {
    let raw: RawConfig = toml::from_str(text)?;
    let method: Method = raw.method.parse()?;
    let rule = match (raw.v_eps_rule.as_str(), raw.eta) {
        ("sigma", None) => VEpsRule::Sigma,
        ("sigma", Some(_)) => return config_err("eta is only used with v_eps_rule = \"sigma_power\"".into()),
        ("sigma_power", Some(eta)) => VEpsRule::SigmaPower(eta),
        ("sigma_power", None) => return config_err("v_eps_rule = \"sigma_power\" needs eta".into()),
        (other, _) => return config_err(format!("unknown v_eps_rule {other:?}")),
    };
    let stray = raw.theta.is_some() || raw.theta2.is_some();
    let theta_mode = match raw.theta_mode.as_str() {
        "zero" => ThetaMode::Zero,
        "adaptive" => ThetaMode::Adaptive,
        "constant" => {
            let Some(t1) = raw.theta else {
                return config_err("theta_mode = \"constant\" needs theta".into());
            };
            let t2 = raw.theta2.unwrap_or_else(|| t1.clone());
            ThetaMode::Constant(t1, t2)
        }
        other => return config_err(format!("unknown theta_mode {other:?}")),
    };
    if !matches!(theta_mode, ThetaMode::Constant(..)) && stray {
        return config_err("theta and theta2 need theta_mode = \"constant\"".into());
    }
    let weight = match raw.weight_cumulant.as_str() {
        "truncated" => WeightCumulant::Truncated,
        "full" => WeightCumulant::Full,
        other => return config_err(format!("unknown weight_cumulant {other:?}")),
    };
    let counts = match (raw.n, raw.n1, raw.n2) {
        (None, None, None) => None,
        (n, n1, n2) => {
            let n = n.or(n1).unwrap_or(2);
            Some((n, n1.unwrap_or(n), n2.unwrap_or(n)))
        }
    };
    if !(raw.sample_scale > 0.0) {
        return config_err(format!("sample_scale must be positive, got {}", raw.sample_scale));
    }
    raw.adaptive.gain()?;
    Ok(EstimatorConfig {
        method,
        eps: raw.eps,
        beta: raw.beta,
        rule,
        theta_mode,
        seed: raw.seed,
        weight,
        adaptive: raw.adaptive,
        strike: raw.payoff.strike,
        counts,
        sample_scale: raw.sample_scale,
    })
}

pub fn load_estimator(path: impl AsRef<Path>) -> Result<EstimatorConfig> {
    parse_estimator(&std::fs::read_to_string(path)?)
}

/// Tilt drivers for the single-level sum and the Romberg correction.
///
/// Adaptive drivers minimise `v₁` at `ε` (ISMC), or `v₁` at `ε^β` and `v₂`
/// at `ε` (ISSR), each on its own substream of `rng`.
pub fn build_drivers(
    cfg: &EstimatorConfig,
    model: &MarketModel,
    payoff: Arc<dyn Payoff>,
    rng: &RngStream,
) -> Result<(Box<dyn TiltDriver>, Box<dyn TiltDriver>)> {
    let d = model.dim();
    match &cfg.theta_mode {
        ThetaMode::Zero => Ok((Box::new(ConstantTilt::zeros(d)), Box::new(ConstantTilt::zeros(d)))),
        ThetaMode::Constant(t1, t2) => {
            model.check_dim(t1)?;
            model.check_dim(t2)?;
            Ok((Box::new(ConstantTilt(t1.clone())), Box::new(ConstantTilt(t2.clone()))))
        }
        ThetaMode::Adaptive => {
            let gain = cfg.adaptive.gain()?;
            let bounds = ProjectionBox::theta_one(model, cfg.adaptive.margin)?;
            let eps1 = if cfg.method == Method::Issr { cfg.eps.powf(cfg.beta_for(model)) } else { cfg.eps };
            let obj1 = VarianceObjective::new(Target::V1, model, eps1, payoff.clone(), cfg.weight)?;
            let obj2 = VarianceObjective::new(Target::V2, model, cfg.eps, payoff, cfg.weight)?;
            let r1 = rng.substream(lane(ROLE_DRIVER1, 0));
            let r2 = rng.substream(lane(ROLE_DRIVER2, 0));
            Ok((
                Box::new(AdaptiveTilt::new(obj1, gain, bounds.clone(), vec![0.0; d], r1)?),
                Box::new(AdaptiveTilt::new(obj2, gain, bounds, vec![0.0; d], r2)?),
            ))
        }
    }
}

/// Runs one estimate on an explicit stream.
pub fn run_estimator(
    cfg: &EstimatorConfig,
    model: &MarketModel,
    payoff: Arc<dyn Payoff>,
    rng: &RngStream,
) -> Result<EstimatorReport> {
    let policy = cfg.policy(model)?;
    match cfg.method {
        Method::Mc => mc_estimate(payoff.as_ref(), model, &policy, rng),
        Method::Sr => sr_estimate(payoff.as_ref(), model, &policy, rng),
        Method::Ismc => {
            let (mut d1, _) = build_drivers(cfg, model, payoff.clone(), rng)?;
            ismc_estimate(payoff.as_ref(), model, &policy, d1.as_mut(), cfg.weight, rng)
        }
        Method::Issr => {
            let (mut d1, mut d2) = build_drivers(cfg, model, payoff.clone(), rng)?;
            issr_estimate(payoff.as_ref(), model, &policy, d1.as_mut(), d2.as_mut(), cfg.weight, rng)
        }
    }
}

/// Runs one estimate of the configured call on stream `(seed, 0)`.
pub fn run_config(cfg: &EstimatorConfig, model: &MarketModel) -> Result<EstimatorReport> {
    run_estimator(cfg, model, cfg.payoff(model), &RngStream::new(cfg.seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_constant_tilts() {
        let cfg = parse_estimator(
            r#"
            method = "issr"
            eps = 1e-2
            theta_mode = "constant"
            theta = [5.3]
            theta2 = [2.5]
            seed = 9
            [payoff]
            strike = 100.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.method, Method::Issr);
        assert_eq!(cfg.theta_mode, ThetaMode::Constant(vec![5.3], vec![2.5]));
        assert_eq!(cfg.rule, VEpsRule::Sigma);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_stray_eta() {
        let e = parse_estimator("method = \"MC\"\neps = 0.1\neta = 0.5\n[payoff]\nstrike = 1.0\n");
        assert!(matches!(e, Err(LevyError::Config(_))));
    }
}
