use rand::distr::Distribution;
use rand_distr::Poisson;

use super::rng::RngStream;
use crate::error::{domain, LevyError, Result};
use crate::levy::cgmy::{check_eps, CgmyParams, Side};
use crate::levy::MarketModel;

/// Terminal value of a truncated path with its simulation cost.
#[derive(Clone, Debug, PartialEq)]
pub struct TerminalSample {
    pub value: Vec<f64>,
    /// Proposals drawn, accepted or not.
    pub jumps_simulated: u64,
    pub jumps_accepted: u64,
}

/// Coarse (cut-off `ε^β`) and fine (cut-off `ε`) terminal values sharing
/// the coarse path.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSample {
    pub coarse: TerminalSample,
    pub fine: TerminalSample,
}

/// Proposal/acceptance counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JumpCount {
    pub simulated: u64,
    pub accepted: u64,
}

impl std::ops::AddAssign for JumpCount {
    fn add_assign(&mut self, o: Self) {
        self.simulated += o.simulated;
        self.accepted += o.accepted;
    }
}

/// One draw of Algorithm-1 type: propose `Z = ε U₁^{-1/Y}` from the
/// untempered power law and keep it with probability `e^{-rate·Z}`.
/// Returns `0` for a rejected proposal.
#[inline]
pub fn propose_jump(rate: f64, y: f64, eps: f64, rng: &mut RngStream) -> f64 {
    let z = eps * rng.uniform_open0().powf(-1.0 / y);
    if rng.uniform() <= (-rate * z).exp() {
        z
    } else {
        0.0
    }
}

/// Positive jump of a CGMY component truncated at `eps` (0 when thinned away).
pub fn sample_positive_jump(p: &CgmyParams, eps: f64, rng: &mut RngStream) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("cut-off must lie in (0, 1), got {eps}"));
    }
    Ok(propose_jump(p.m(), p.y(), eps, rng))
}

#[inline]
fn poisson_count(dist: &Option<Poisson<f64>>, rng: &mut RngStream) -> u64 {
    match dist {
        Some(d) => d.sample(rng) as u64,
        None => 0,
    }
}

fn poisson(mean: f64) -> Result<Option<Poisson<f64>>> {
    if mean <= 0.0 {
        return Ok(None);
    }
    Poisson::new(mean)
        .map(Some)
        .map_err(|e| LevyError::InvalidParams(format!("Poisson mean {mean}: {e}")))
}

#[derive(Clone, Debug)]
struct ComponentSampler {
    params: CgmyParams,
    raw_drift: f64,
    proposals: Option<Poisson<f64>>,
    /// `∫_{|x|<ε} x^n ν(dx) / n!` for `n = 2..`, the Taylor coefficients of
    /// the small-jump correction.
    series: Vec<f64>,
}

/// Series terms kept; enough for `|θ|ε ≤ SERIES_RADIUS` to full precision.
const SERIES_TERMS: i32 = 32;
const SERIES_RADIUS: f64 = 2.0;

impl ComponentSampler {
    fn small_jump_correction(&self, eps: f64, t: f64) -> f64 {
        if (t * eps).abs() > SERIES_RADIUS {
            return self.params.small_jump_correction(eps, t).expect("checked tilt");
        }
        let mut acc = 0.0;
        for c in self.series.iter().rev() {
            acc = acc * t + c;
        }
        acc * t * t
    }

    fn small_jump_correction_grad(&self, eps: f64, t: f64) -> f64 {
        if (t * eps).abs() > SERIES_RADIUS {
            return self.params.small_jump_correction_grad(eps, t).expect("checked tilt");
        }
        let mut acc = 0.0;
        for (k, c) in self.series.iter().enumerate().rev() {
            acc = acc * t + (k + 2) as f64 * c;
        }
        acc * t
    }
}

/// The compound-Poisson-plus-drift approximation `L^ε` of a market model
/// at a fixed cut-off and horizon, with its raw drift cached.
///
/// `L^ε_t = t a_ε + Σ_{s≤t, |ΔL_s|≥ε} ΔL_s` with `a_ε = γ - ∫_{ε≤|x|≤1} x ν(dx)`.
/// An Esscher tilt only changes the tempering rates; `a_ε` is unchanged.
#[derive(Clone, Debug)]
pub struct TruncatedModel {
    model: MarketModel,
    eps: f64,
    horizon: f64,
    parts: Vec<ComponentSampler>,
}

impl TruncatedModel {
    /// Truncation at `eps` over the model's maturity.
    pub fn new(model: &MarketModel, eps: f64) -> Result<Self> {
        Self::with_horizon(model, eps, model.maturity())
    }

    pub fn with_horizon(model: &MarketModel, eps: f64, horizon: f64) -> Result<Self> {
        check_eps(eps)?;
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return domain(format!("horizon must be nonnegative, got {horizon}"));
        }
        let mut parts = Vec::with_capacity(model.dim());
        for (j, p) in model.components().iter().enumerate() {
            let compensator = p.side_moment_quad(Side::Positive, 1, eps, Some(1.0), 0.0)
                - p.side_moment_quad(Side::Negative, 1, eps, Some(1.0), 0.0);
            let mut series = Vec::with_capacity(SERIES_TERMS as usize - 1);
            let mut factorial = 1.0;
            for n in 2..=SERIES_TERMS {
                factorial *= n as f64;
                series.push(p.small_moment(eps, n)? / factorial);
            }
            parts.push(ComponentSampler {
                params: *p,
                raw_drift: model.gamma(j) - compensator,
                proposals: poisson(horizon * p.proposal_intensity(eps))?,
                series,
            });
        }
        Ok(Self { model: model.clone(), eps, horizon, parts })
    }

    pub fn model(&self) -> &MarketModel {
        &self.model
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }
    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    /// Raw drift `a_ε` of component `j`.
    pub fn raw_drift(&self, j: usize) -> f64 {
        self.parts[j].raw_drift
    }

    /// Expected proposals per path over both sides of every component.
    pub fn expected_proposals(&self) -> f64 {
        self.parts.iter().map(|c| 2.0 * self.horizon * c.params.proposal_intensity(self.eps)).sum()
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        self.model.check_dim(theta)?;
        if self.model.in_theta_one(theta) {
            Ok(())
        } else {
            domain(format!("tilt {theta:?} outside Θ₁"))
        }
    }

    /// `κ_ε(θ) = κ(θ) - ∫_{|x|<ε}(e^{θx}-1-θx) ν(dx)`, the correction summed
    /// as a Taylor series in `θ` when `|θ|ε` is small.
    pub fn cumulant(&self, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.cumulant_unchecked(theta))
    }

    pub(crate) fn cumulant_unchecked(&self, theta: &[f64]) -> f64 {
        let mut k = 0.0;
        for (j, (c, &t)) in self.parts.iter().zip(theta).enumerate() {
            if t == 0.0 {
                continue;
            }
            k += self.model.component_cumulant(j, t).expect("checked tilt") - c.small_jump_correction(self.eps, t);
        }
        k
    }

    /// `κ_ε(θ)` as `a_ε θ + ∫_{|x|≥ε}(e^{θx}-1) ν(dx)` through incomplete gamma
    /// functions. Loses digits to cancellation at small `ε`; kept as a cross-check.
    pub fn cumulant_incomplete_gamma(&self, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let eps = self.eps;
        let mut k = 0.0;
        for (c, &t) in self.parts.iter().zip(theta) {
            let p = &c.params;
            k += c.raw_drift * t
                + (p.tail_moment(0, p.m() - t, eps) - p.tail_moment(0, p.m(), eps))
                + (p.tail_moment(0, p.g() + t, eps) - p.tail_moment(0, p.g(), eps));
        }
        Ok(k)
    }

    /// `∇κ_ε(θ)`.
    pub fn grad_cumulant(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        let mut out = vec![0.0; self.dim()];
        self.grad_into(theta, &mut out);
        Ok(out)
    }

    pub(crate) fn grad_into(&self, theta: &[f64], out: &mut [f64]) {
        for (j, ((c, &t), o)) in self.parts.iter().zip(theta).zip(out.iter_mut()).enumerate() {
            *o = self.model.component_cumulant_grad(j, t).expect("checked tilt") - c.small_jump_correction_grad(self.eps, t);
        }
    }

    /// Draws `L^ε_t` (or its `θ`-tilted version) into `out`.
    pub(crate) fn fill(&self, theta: Option<&[f64]>, out: &mut [f64], rng: &mut RngStream) -> JumpCount {
        let mut count = JumpCount::default();
        for (j, c) in self.parts.iter().enumerate() {
            let t = theta.map_or(0.0, |th| th[j]);
            let p = &c.params;
            let mut x = c.raw_drift * self.horizon;
            for (rate, sign) in [(p.m() - t, 1.0), (p.g() + t, -1.0)] {
                let n = poisson_count(&c.proposals, rng);
                let mut acc = 0;
                for _ in 0..n {
                    let z = propose_jump(rate, p.y(), self.eps, rng);
                    if z > 0.0 {
                        x += sign * z;
                        acc += 1;
                    }
                }
                count.simulated += n;
                count.accepted += acc;
            }
            out[j] = x;
        }
        count
    }

    pub fn sample_terminal(&self, rng: &mut RngStream) -> TerminalSample {
        let mut value = vec![0.0; self.dim()];
        let c = self.fill(None, &mut value, rng);
        TerminalSample { value, jumps_simulated: c.simulated, jumps_accepted: c.accepted }
    }

    /// Draws `L^{ε,θ}_t` under the Esscher measure `P_θ`.
    pub fn sample_tilted_terminal(&self, theta: &[f64], rng: &mut RngStream) -> Result<TerminalSample> {
        self.check_theta(theta)?;
        let mut value = vec![0.0; self.dim()];
        let c = self.fill(Some(theta), &mut value, rng);
        Ok(TerminalSample { value, jumps_simulated: c.simulated, jumps_accepted: c.accepted })
    }
}

#[derive(Clone, Debug)]
struct BandSampler {
    params: CgmyParams,
    drift: f64,
    proposals: Option<Poisson<f64>>,
}

/// Joint sampler of `(L^{ε^β}, L^ε)` where the fine path is the coarse path
/// plus an independent band process of jumps with size in `[ε, ε^β)`.
#[derive(Clone, Debug)]
pub struct CoupledSampler {
    coarse: TruncatedModel,
    fine: TruncatedModel,
    beta: f64,
    band: Vec<BandSampler>,
}

impl CoupledSampler {
    /// `beta = 1` gives an empty band (fine equals coarse).
    pub fn new(model: &MarketModel, eps: f64, beta: f64) -> Result<Self> {
        Self::with_horizon(model, eps, beta, model.maturity())
    }

    pub fn with_horizon(model: &MarketModel, eps: f64, beta: f64, horizon: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return domain(format!("Romberg exponent must lie in (0, 1], got {beta}"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return domain(format!("cut-off must lie in (0, 1), got {eps}"));
        }
        let coarse_eps = eps.powf(beta);
        let coarse = TruncatedModel::with_horizon(model, coarse_eps, horizon)?;
        let fine = TruncatedModel::with_horizon(model, eps, horizon)?;
        let band = model
            .components()
            .iter()
            .enumerate()
            .map(|(j, p)| {
                Ok(BandSampler {
                    params: *p,
                    drift: fine.raw_drift(j) - coarse.raw_drift(j),
                    proposals: poisson(horizon * p.band_proposal_intensity(eps, coarse_eps))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coarse, fine, beta, band })
    }

    pub fn coarse(&self) -> &TruncatedModel {
        &self.coarse
    }
    pub fn fine(&self) -> &TruncatedModel {
        &self.fine
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Expected band proposals per path.
    pub fn expected_band_proposals(&self) -> f64 {
        let (lo, hi) = (self.fine.eps(), self.coarse.eps());
        self.band
            .iter()
            .map(|b| 2.0 * self.fine.horizon() * b.params.band_proposal_intensity(lo, hi))
            .sum()
    }

    pub(crate) fn fill(
        &self,
        theta: Option<&[f64]>,
        coarse: &mut [f64],
        fine: &mut [f64],
        rng: &mut RngStream,
    ) -> (JumpCount, JumpCount) {
        let coarse_count = self.coarse.fill(theta, coarse, rng);
        let mut band_count = JumpCount::default();
        let lo = self.fine.eps();
        let hi = self.coarse.eps();
        let horizon = self.fine.horizon();
        for (j, b) in self.band.iter().enumerate() {
            let t = theta.map_or(0.0, |th| th[j]);
            let p = &b.params;
            let y = p.y();
            let lo_pow = lo.powf(-y);
            let span = lo_pow - hi.powf(-y);
            let mut x = b.drift * horizon;
            for (rate, sign) in [(p.m() - t, 1.0), (p.g() + t, -1.0)] {
                let n = poisson_count(&b.proposals, rng);
                let mut acc = 0;
                for _ in 0..n {
                    let z = (lo_pow - rng.uniform() * span).powf(-1.0 / y);
                    if rng.uniform() <= (-rate * z).exp() {
                        x += sign * z;
                        acc += 1;
                    }
                }
                band_count.simulated += n;
                band_count.accepted += acc;
            }
            fine[j] = coarse[j] + x;
        }
        let mut fine_count = coarse_count;
        fine_count += band_count;
        (coarse_count, fine_count)
    }

    fn pack(coarse: Vec<f64>, fine: Vec<f64>, counts: (JumpCount, JumpCount)) -> CoupledSample {
        CoupledSample {
            coarse: TerminalSample {
                value: coarse,
                jumps_simulated: counts.0.simulated,
                jumps_accepted: counts.0.accepted,
            },
            fine: TerminalSample { value: fine, jumps_simulated: counts.1.simulated, jumps_accepted: counts.1.accepted },
        }
    }

    pub fn sample_coupled(&self, rng: &mut RngStream) -> CoupledSample {
        let d = self.fine.dim();
        let (mut c, mut f) = (vec![0.0; d], vec![0.0; d]);
        let counts = self.fill(None, &mut c, &mut f, rng);
        Self::pack(c, f, counts)
    }

    /// Coarse path and band both drawn under `P_θ`.
    pub fn sample_tilted_coupled(&self, theta: &[f64], rng: &mut RngStream) -> Result<CoupledSample> {
        self.fine.check_theta(theta)?;
        let d = self.fine.dim();
        let (mut c, mut f) = (vec![0.0; d], vec![0.0; d]);
        let counts = self.fill(Some(theta), &mut c, &mut f, rng);
        Ok(Self::pack(c, f, counts))
    }
}

/// `L^ε_t` for a model; builds a [`TruncatedModel`] on the fly.
pub fn sample_terminal(model: &MarketModel, eps: f64, t: f64, rng: &mut RngStream) -> Result<TerminalSample> {
    Ok(TruncatedModel::with_horizon(model, eps, t)?.sample_terminal(rng))
}

pub fn sample_tilted_terminal(
    model: &MarketModel,
    eps: f64,
    theta: &[f64],
    t: f64,
    rng: &mut RngStream,
) -> Result<TerminalSample> {
    TruncatedModel::with_horizon(model, eps, t)?.sample_tilted_terminal(theta, rng)
}

pub fn sample_coupled(model: &MarketModel, eps: f64, beta: f64, t: f64, rng: &mut RngStream) -> Result<CoupledSample> {
    Ok(CoupledSampler::with_horizon(model, eps, beta, t)?.sample_coupled(rng))
}

pub fn sample_tilted_coupled(
    model: &MarketModel,
    eps: f64,
    beta: f64,
    theta: &[f64],
    t: f64,
    rng: &mut RngStream,
) -> Result<CoupledSample> {
    CoupledSampler::with_horizon(model, eps, beta, t)?.sample_tilted_coupled(theta, rng)
}
