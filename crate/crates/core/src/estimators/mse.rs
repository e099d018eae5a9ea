use std::sync::Arc;

use rayon::prelude::*;

use super::config::{run_estimator, EstimatorConfig};
use super::payoff::Payoff;
use super::report::{EstimatorReport, Method};
use crate::error::Result;
use crate::levy::MarketModel;
use crate::sampler::RngStream;

/// Stream of replication `rep` for `method`. Methods get disjoint stream ids
/// so replications never share random numbers across methods.
pub fn replication_stream(seed: u64, method: Method, rep: u64) -> RngStream {
    let idx = Method::ALL.iter().position(|m| *m == method).unwrap_or(0) as u64;
    RngStream::new(seed, (idx << 32) | rep)
}

#[derive(Clone, Debug)]
pub struct MseSummary {
    pub method: Method,
    pub eps: f64,
    pub reference: f64,
    /// `(1/n) Σ (reference - estimate_i)²`.
    pub mse: f64,
    pub mean_estimate: f64,
    /// Mean of the per-run `stderr²`.
    pub mean_stderr_sq: f64,
    pub mean_wall_time_s: f64,
    pub mean_cost: f64,
    pub reports: Vec<EstimatorReport>,
}

impl MseSummary {
    pub fn from_reports(reference: f64, reports: Vec<EstimatorReport>) -> Self {
        let n = reports.len().max(1) as f64;
        let avg = |f: &dyn Fn(&EstimatorReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        Self {
            method: reports.first().map_or(Method::Mc, |r| r.method),
            eps: reports.first().map_or(f64::NAN, |r| r.eps),
            reference,
            mse: avg(&|r| (reference - r.estimate).powi(2)),
            mean_estimate: avg(&|r| r.estimate),
            mean_stderr_sq: avg(&|r| r.stderr * r.stderr),
            mean_wall_time_s: avg(&|r| r.wall_time_s),
            mean_cost: avg(&|r| r.cost as f64),
            reports,
        }
    }
}

/// Runs `n_rep` independent estimates concurrently and scores them against
/// `reference`.
pub fn mse_over_replications(
    cfg: &EstimatorConfig,
    model: &MarketModel,
    payoff: Arc<dyn Payoff>,
    n_rep: u64,
    reference: f64,
) -> Result<MseSummary> {
    let reports = (0..n_rep)
        .into_par_iter()
        .map(|rep| run_estimator(cfg, model, payoff.clone(), &replication_stream(cfg.seed, cfg.method, rep)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MseSummary::from_reports(reference, reports))
}
