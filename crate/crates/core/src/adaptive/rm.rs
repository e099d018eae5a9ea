use std::sync::Arc;

use crate::error::{domain, LevyError, Result};
use crate::estimators::{Payoff, WeightCumulant};
use crate::levy::MarketModel;
use crate::sampler::{RngStream, TruncatedModel};

use super::projection::{GainSchedule, ProjectionBox};

/// Which variance objective a tilt minimises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `v₁(θ) = E[F²(L) e^{-θ·L + Tκ(θ)}]`, the plain-Monte-Carlo variance.
    V1,
    /// `v₂(θ) = E[∇F·Σ∇F(L) e^{-θ·L + Tκ(θ)}]`, the Romberg correction variance.
    V2,
}

impl std::str::FromStr for Target {
    type Err = LevyError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" | "V1" | "1" => Ok(Target::V1),
            "v2" | "V2" | "2" => Ok(Target::V2),
            _ => Err(LevyError::Config(format!("unknown target {s:?} (expected v1 or v2)"))),
        }
    }
}

/// Everything needed to evaluate `F_i`, the Esscher weight and `H_i` at a
/// fixed cut-off.
#[derive(Clone)]
pub struct VarianceObjective {
    target: Target,
    sampler: TruncatedModel,
    payoff: Arc<dyn Payoff>,
    sigma_diag: Vec<f64>,
    kind: WeightCumulant,
}

impl VarianceObjective {
    pub fn new(
        target: Target,
        model: &MarketModel,
        eps: f64,
        payoff: Arc<dyn Payoff>,
        kind: WeightCumulant,
    ) -> Result<Self> {
        Ok(Self::from_sampler(target, TruncatedModel::new(model, eps)?, payoff, kind))
    }

    pub fn from_sampler(target: Target, sampler: TruncatedModel, payoff: Arc<dyn Payoff>, kind: WeightCumulant) -> Self {
        let sigma_diag = sampler.model().sigma_limit_diag();
        Self { target, sampler, payoff, sigma_diag, kind }
    }

    pub fn target(&self) -> Target {
        self.target
    }
    pub fn sampler(&self) -> &TruncatedModel {
        &self.sampler
    }
    pub fn dim(&self) -> usize {
        self.sampler.dim()
    }
    pub fn kind(&self) -> WeightCumulant {
        self.kind
    }

    /// `F_i(x)`.
    pub fn fi(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        match self.target {
            Target::V1 => self.payoff.f1(x),
            Target::V2 => self.payoff.f2(x, &self.sigma_diag, scratch),
        }
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        self.sampler.model().check_dim(theta)?;
        if self.sampler.model().in_theta_one(theta) {
            Ok(())
        } else {
            domain(format!("tilt {theta:?} outside Θ₁"))
        }
    }

    /// `Tκ(θ)` with the configured cumulant.
    pub fn log_normalizer(&self, theta: &[f64]) -> Result<f64> {
        self.check(theta)?;
        let t = self.sampler.horizon();
        Ok(t * match self.kind {
            WeightCumulant::Truncated => self.sampler.cumulant_unchecked(theta),
            WeightCumulant::Full => self.sampler.model().cumulant(theta)?,
        })
    }

    /// `T∇κ(θ)` with the configured cumulant.
    pub fn grad_log_normalizer(&self, theta: &[f64], out: &mut [f64]) -> Result<()> {
        self.check(theta)?;
        match self.kind {
            WeightCumulant::Truncated => self.sampler.grad_into(theta, out),
            WeightCumulant::Full => {
                for (j, (o, t)) in out.iter_mut().zip(theta).enumerate() {
                    *o = self.sampler.model().component_cumulant_grad(j, *t)?;
                }
            }
        }
        let t = self.sampler.horizon();
        out.iter_mut().for_each(|o| *o *= t);
        Ok(())
    }

    /// `H_i(θ, x) = (T∇κ(θ) - x) F_i(x) e^{-θ·x + Tκ(θ)}` written into `out`.
    pub fn h_into(&self, theta: &[f64], x: &[f64], out: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        self.check(theta)?;
        let f = self.fi(x, scratch);
        if f == 0.0 {
            out.fill(0.0);
            return Ok(());
        }
        let lw = self.log_normalizer(theta)? - dot(theta, x);
        self.grad_log_normalizer(theta, out)?;
        let factor = f * lw.exp();
        for (o, xj) in out.iter_mut().zip(x) {
            *o = (*o - xj) * factor;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `H_i(θ, x)` as a fresh vector.
pub fn h_function(obj: &VarianceObjective, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; obj.dim()];
    let mut scratch = vec![0.0; obj.dim()];
    obj.h_into(theta, x, &mut out, &mut scratch)?;
    Ok(out)
}

/// Iterate of the projected Robbins–Monro recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct RmState {
    pub theta: Vec<f64>,
    /// Steps taken so far.
    pub n: u64,
    pub target: Target,
    pub eps: f64,
    /// `θ_0, θ_1, …` when recording is on.
    pub trace: Option<Vec<Vec<f64>>>,
}

impl RmState {
    pub fn new(theta0: Vec<f64>, target: Target, eps: f64, record: bool) -> Self {
        let trace = record.then(|| vec![theta0.clone()]);
        Self { theta: theta0, n: 0, target, eps, trace }
    }

    /// `θ ← Π_K[θ - γ_{n+1} H_i(θ, x)]` in place.
    pub fn step(
        &mut self,
        x: &[f64],
        gain: &GainSchedule,
        bounds: &ProjectionBox,
        obj: &VarianceObjective,
        h: &mut [f64],
        scratch: &mut [f64],
    ) -> Result<()> {
        obj.h_into(&self.theta, x, h, scratch)?;
        self.n += 1;
        let g = gain.gain(self.n);
        for (t, hj) in self.theta.iter_mut().zip(h.iter()) {
            *t -= g * hj;
        }
        bounds.project(&mut self.theta);
        if let Some(tr) = self.trace.as_mut() {
            tr.push(self.theta.clone());
        }
        Ok(())
    }
}

/// One projected Robbins–Monro step against the sample `x`.
pub fn rm_step(
    state: &RmState,
    x: &[f64],
    gain: &GainSchedule,
    bounds: &ProjectionBox,
    obj: &VarianceObjective,
) -> Result<RmState> {
    let mut next = state.clone();
    let d = obj.dim();
    next.step(x, gain, bounds, obj, &mut vec![0.0; d], &mut vec![0.0; d])?;
    Ok(next)
}

/// Runs `n_iters` steps against fresh untilted samples of `L^ε_T`.
pub fn rm_run(
    obj: &VarianceObjective,
    n_iters: u64,
    gain: &GainSchedule,
    bounds: &ProjectionBox,
    theta0: Vec<f64>,
    rng: &mut RngStream,
    record: bool,
) -> Result<RmState> {
    bounds.check_inside(obj.sampler().model())?;
    if !bounds.contains(&theta0) {
        return domain(format!("starting tilt {theta0:?} outside the projection box"));
    }
    let d = obj.dim();
    let mut state = RmState::new(theta0, obj.target(), obj.sampler().eps(), record);
    let (mut x, mut h, mut scratch) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for _ in 0..n_iters {
        obj.sampler().fill(None, &mut x, rng);
        state.step(&x, gain, bounds, obj, &mut h, &mut scratch)?;
    }
    Ok(state)
}
