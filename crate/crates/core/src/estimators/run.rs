use std::time::Instant;

use rayon::prelude::*;

use super::driver::{TiltDriver, WeightCumulant};
use super::payoff::Payoff;
use super::policy::SampleSizePolicy;
use super::report::{EstimatorReport, LevelSummary, Method};
use crate::adaptive::rm::dot;
use crate::error::{domain, Result};
use crate::levy::MarketModel;
use crate::sampler::{CoupledSampler, RngStream, TruncatedModel};
use crate::stats::Welford;

/// Samples per chunk. Each chunk owns a substream and a running-moment
/// accumulator; chunks are merged in index order, so results do not depend
/// on the number of threads.
pub const CHUNK: u64 = 4096;

/// Substream roles.
pub(crate) const ROLE_LEVEL0: u64 = 0;
pub(crate) const ROLE_PAIRS: u64 = 1;
pub(crate) const ROLE_DRIVER1: u64 = 2;
pub(crate) const ROLE_DRIVER2: u64 = 3;

pub(crate) fn lane(role: u64, chunk: u64) -> u64 {
    (role << 48) | chunk
}

/// `(chunk index, chunk length)` covering `n` samples.
pub fn chunks(n: u64) -> Vec<(u64, u64)> {
    (0..n.div_ceil(CHUNK)).map(|c| (c, CHUNK.min(n - c * CHUNK))).collect()
}

#[derive(Clone, Copy, Debug, Default)]
struct Acc {
    w: Welford,
    cost: u64,
}

impl Acc {
    fn merge(&mut self, o: &Acc) {
        self.w.merge(&o.w);
        self.cost += o.cost;
    }

    fn summary(&self) -> LevelSummary {
        LevelSummary { n: self.w.count(), mean: self.w.mean(), variance: self.w.variance(), cost: self.cost }
    }
}

/// Runs `n` samples of `kernel` chunk-parallel and merges in chunk order.
fn parallel_level<K>(n: u64, role: u64, root: &RngStream, dim: usize, kernel: K) -> Acc
where
    K: Fn(&mut RngStream, &mut [f64], &mut [f64]) -> (f64, u64) + Sync,
{
    let parts: Vec<Acc> = chunks(n)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = root.substream(lane(role, c));
            let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
            let mut acc = Acc::default();
            for _ in 0..len {
                let (v, cost) = kernel(&mut rng, &mut a, &mut b);
                acc.w.push(v);
                acc.cost += cost;
            }
            acc
        })
        .collect();
    let mut total = Acc::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Same chunk layout as [`parallel_level`], run sequentially with a tilt
/// driver consulted before and advanced after every sample.
fn adaptive_level<K>(
    n: u64,
    role: u64,
    root: &RngStream,
    dim: usize,
    driver: &mut dyn TiltDriver,
    mut kernel: K,
) -> Result<Acc>
where
    K: FnMut(&[f64], &mut RngStream, &mut [f64], &mut [f64]) -> Result<(f64, u64)>,
{
    let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
    let mut total = Acc::default();
    for (c, len) in chunks(n) {
        let mut rng = root.substream(lane(role, c));
        let mut acc = Acc::default();
        for _ in 0..len {
            let (v, cost) = kernel(driver.theta(), &mut rng, &mut a, &mut b)?;
            acc.w.push(v);
            acc.cost += cost;
            driver.advance()?;
        }
        total.merge(&acc);
    }
    Ok(total)
}

/// `Tκ(θ)` for the weight, cached on the last tilt seen.
struct Normalizer<'a> {
    sampler: &'a TruncatedModel,
    kind: WeightCumulant,
    last: Vec<f64>,
    value: f64,
}

impl<'a> Normalizer<'a> {
    fn new(sampler: &'a TruncatedModel, kind: WeightCumulant) -> Self {
        Self { sampler, kind, last: Vec::new(), value: 0.0 }
    }

    fn get(&mut self, theta: &[f64]) -> Result<f64> {
        if self.last.as_slice() != theta {
            let model = self.sampler.model();
            if !model.in_theta_one(theta) {
                return domain(format!("tilt {theta:?} outside Θ₁"));
            }
            let k = match self.kind {
                WeightCumulant::Truncated => self.sampler.cumulant_unchecked(theta),
                WeightCumulant::Full => model.cumulant(theta)?,
            };
            self.value = self.sampler.horizon() * k;
            self.last = theta.to_vec();
        }
        Ok(self.value)
    }
}

#[inline]
fn weight(theta: &[f64], x: &[f64], log_norm: f64) -> f64 {
    (log_norm - dot(theta, x)).exp()
}

fn finish(
    method: Method,
    model: &MarketModel,
    policy: &SampleSizePolicy,
    rng: &RngStream,
    levels: &[Acc],
    driver_cost: u64,
    start: Instant,
) -> EstimatorReport {
    let disc = model.discount();
    let estimate = disc * levels.iter().map(|a| a.w.mean()).sum::<f64>();
    let stderr = disc * levels.iter().map(|a| a.w.stderr().powi(2)).sum::<f64>().sqrt();
    EstimatorReport {
        method,
        eps: policy.eps,
        beta: policy.beta,
        n: policy.n,
        n1: policy.n1,
        n2: policy.n2,
        estimate,
        stderr,
        cost: levels.iter().map(|a| a.cost).sum::<u64>() + driver_cost,
        driver_cost,
        wall_time_s: start.elapsed().as_secs_f64(),
        seed: rng.seed(),
        levels: levels.iter().map(Acc::summary).collect(),
    }
}

/// Crude Monte Carlo: `e^{-rT} (1/N) Σ F(L^ε_{T,i})`.
pub fn mc_estimate(
    payoff: &dyn Payoff,
    model: &MarketModel,
    policy: &SampleSizePolicy,
    rng: &RngStream,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    let tm = TruncatedModel::new(model, policy.eps)?;
    let acc = parallel_level(policy.n, ROLE_LEVEL0, rng, model.dim(), |r, x, _| {
        let c = tm.fill(None, x, r);
        (payoff.evaluate(x), c.simulated)
    });
    Ok(finish(Method::Mc, model, policy, rng, &[acc], 0, start))
}

/// Statistical Romberg: `N₁` coarse samples at `ε^β` plus `N₂` independent
/// coupled corrections `F(L^ε) - F(L^{ε^β})`.
pub fn sr_estimate(
    payoff: &dyn Payoff,
    model: &MarketModel,
    policy: &SampleSizePolicy,
    rng: &RngStream,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    let cs = CoupledSampler::new(model, policy.eps, policy.beta)?;
    let d = model.dim();
    let level0 = parallel_level(policy.n1, ROLE_LEVEL0, rng, d, |r, x, _| {
        let c = cs.coarse().fill(None, x, r);
        (payoff.evaluate(x), c.simulated)
    });
    let level1 = parallel_level(policy.n2, ROLE_PAIRS, rng, d, |r, coarse, fine| {
        let (_, c) = cs.fill(None, coarse, fine, r);
        (payoff.evaluate(fine) - payoff.evaluate(coarse), c.simulated)
    });
    Ok(finish(Method::Sr, model, policy, rng, &[level0, level1], 0, start))
}

fn tilted_single_level(
    payoff: &dyn Payoff,
    tm: &TruncatedModel,
    n: u64,
    role: u64,
    driver: &mut dyn TiltDriver,
    kind: WeightCumulant,
    rng: &RngStream,
) -> Result<Acc> {
    let d = tm.dim();
    if driver.is_constant() {
        let theta = driver.theta().to_vec();
        let ln = Normalizer::new(tm, kind).get(&theta)?;
        return Ok(parallel_level(n, role, rng, d, |r, x, _| {
            let c = tm.fill(Some(&theta), x, r);
            (payoff.evaluate(x) * weight(&theta, x, ln), c.simulated)
        }));
    }
    let mut norm = Normalizer::new(tm, kind);
    adaptive_level(n, role, rng, d, driver, |theta, r, x, _| {
        let ln = norm.get(theta)?;
        let c = tm.fill(Some(theta), x, r);
        Ok((payoff.evaluate(x) * weight(theta, x, ln), c.simulated))
    })
}

/// Importance-sampled Monte Carlo:
/// `e^{-rT} (1/N) Σ_k F(L^{ε,θ_{k-1}}_k) e^{-θ_{k-1}·L^{ε,θ_{k-1}}_k + Tκ_ε(θ_{k-1})}`.
pub fn ismc_estimate(
    payoff: &dyn Payoff,
    model: &MarketModel,
    policy: &SampleSizePolicy,
    driver: &mut dyn TiltDriver,
    kind: WeightCumulant,
    rng: &RngStream,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    model.check_dim(driver.theta())?;
    let tm = TruncatedModel::new(model, policy.eps)?;
    let acc = tilted_single_level(payoff, &tm, policy.n, ROLE_LEVEL0, driver, kind, rng)?;
    Ok(finish(Method::Ismc, model, policy, rng, &[acc], driver.cost(), start))
}

/// Importance-sampled statistical Romberg. `driver1` tilts the coarse level
/// at `ε^β`; `driver2` tilts the coupled pairs, weighted on the fine path.
pub fn issr_estimate(
    payoff: &dyn Payoff,
    model: &MarketModel,
    policy: &SampleSizePolicy,
    driver1: &mut dyn TiltDriver,
    driver2: &mut dyn TiltDriver,
    kind: WeightCumulant,
    rng: &RngStream,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    model.check_dim(driver1.theta())?;
    model.check_dim(driver2.theta())?;
    let cs = CoupledSampler::new(model, policy.eps, policy.beta)?;
    let d = model.dim();
    let level0 = tilted_single_level(payoff, cs.coarse(), policy.n1, ROLE_LEVEL0, driver1, kind, rng)?;
    let fine = cs.fine();
    let level1 = if driver2.is_constant() {
        let theta = driver2.theta().to_vec();
        let ln = Normalizer::new(fine, kind).get(&theta)?;
        parallel_level(policy.n2, ROLE_PAIRS, rng, d, |r, c, f| {
            let (_, cost) = cs.fill(Some(&theta), c, f, r);
            ((payoff.evaluate(f) - payoff.evaluate(c)) * weight(&theta, f, ln), cost.simulated)
        })
    } else {
        let mut norm = Normalizer::new(fine, kind);
        adaptive_level(policy.n2, ROLE_PAIRS, rng, d, driver2, |theta, r, c, f| {
            let ln = norm.get(theta)?;
            let (_, cost) = cs.fill(Some(theta), c, f, r);
            Ok(((payoff.evaluate(f) - payoff.evaluate(c)) * weight(theta, f, ln), cost.simulated))
        })?
    };
    let driver_cost = driver1.cost() + driver2.cost();
    Ok(finish(Method::Issr, model, policy, rng, &[level0, level1], driver_cost, start))
}
