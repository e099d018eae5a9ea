//! High-effort Monte Carlo reference prices stored as fixtures.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::estimators::{make_policy, mc_estimate, CallOnSum, VEpsRule};
use crate::levy::MarketModel;
use crate::sampler::RngStream;

/// Settings of a reference run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceSettings {
    pub eps: f64,
    /// Number of paths; `None` takes `σ⁻²(ε)`.
    pub n: Option<u64>,
    pub seed: u64,
    pub strike: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub price: f64,
    pub stderr: f64,
    pub eps: f64,
    pub n: u64,
    pub seed: u64,
    pub strike: f64,
    pub dim: usize,
    pub cost: u64,
    pub wall_time_s: f64,
}

/// Plain Monte Carlo price of the call on the sum of spots on stream `(seed, 0)`.
pub fn make_reference(model: &MarketModel, s: &ReferenceSettings) -> Result<ReferenceRecord> {
    let start = Instant::now();
    // The Romberg exponent only sizes the unused correction level.
    let policy = make_policy(model, s.eps, 0.5, VEpsRule::Sigma)?;
    let policy = match s.n {
        Some(n) if n < 2 => return Err(LevyError::Config(format!("reference run needs at least 2 paths, got {n}"))),
        Some(n) => policy.with_counts(n, n, n),
        None => policy,
    };
    let payoff = CallOnSum::new(s.strike, model);
    let r = mc_estimate(&payoff, model, &policy, &RngStream::new(s.seed, 0))?;
    Ok(ReferenceRecord {
        price: r.estimate,
        stderr: r.stderr,
        eps: s.eps,
        n: r.n,
        seed: s.seed,
        strike: s.strike,
        dim: model.dim(),
        cost: r.cost,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn save_reference(record: &ReferenceRecord, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(record).map_err(|e| LevyError::Config(format!("cannot serialise reference: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_reference(path: impl AsRef<Path>) -> Result<ReferenceRecord> {
    Ok(toml::from_str(&std::fs::read_to_string(path)?)?)
}
