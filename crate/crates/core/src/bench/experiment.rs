//! Replicated MSE experiments.
//!
//! ```toml
//! model = "model_1d.toml"         # relative to this file
//! methods = ["MC", "SR", "ISMC", "ISSR"]
//! eps = [1e-1, 1e-2, 1e-3]
//! replications = 30
//! theta = "adaptive"              # or "fixed" with theta1 / theta2
//! seed = 1
//! output = "bench.csv"
//!
//! [payoff]
//! strike = 100.0
//! ```
//!
//! Optional keys: `beta`, `full_eps` (ladder used with `--full`),
//! `reference` (a number) or `reference_file` (written by `make-reference`),
//! `sample_scale`, `weight_cumulant` and an `[adaptive]` table. Without a
//! reference, one-dimensional models are priced by the cosine expansion.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use serde::{Deserialize, Serialize};

use super::reference::load_reference;
use crate::cos::{cos_price, CosConfig};
use crate::error::{LevyError, Result};
use crate::estimators::{
    mse_over_replications, AdaptiveSettings, CallOnSum, EstimatorConfig, Method, MseSummary, Payoff, ThetaMode,
    WeightCumulant,
};
use crate::levy::{load_model, MarketModel};

pub const DEFAULT_LADDER: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const FULL_LADDER: [f64; 5] = [1e-1, 1e-2, 1e-3, 3e-4, 1e-4];

#[derive(Clone, Debug, PartialEq)]
pub enum ThetaSource {
    Adaptive,
    /// Tilts for the single-level sum and the Romberg correction.
    Fixed(Vec<f64>, Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: MarketModel,
    pub model_path: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub eps: Vec<f64>,
    pub full_eps: Vec<f64>,
    pub beta: Option<f64>,
    pub replications: u64,
    pub theta: ThetaSource,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub strike: f64,
    pub reference: Option<f64>,
    pub sample_scale: f64,
    pub weight: WeightCumulant,
    pub adaptive: AdaptiveSettings,
}

impl ExperimentConfig {
    /// All four methods on the default ladder with 30 adaptive replications.
    pub fn new(model: MarketModel, strike: f64, seed: u64) -> Self {
        Self {
            model,
            model_path: None,
            methods: Method::ALL.to_vec(),
            eps: DEFAULT_LADDER.to_vec(),
            full_eps: FULL_LADDER.to_vec(),
            beta: None,
            replications: 30,
            theta: ThetaSource::Adaptive,
            seed,
            output: None,
            strike,
            reference: None,
            sample_scale: 1.0,
            weight: WeightCumulant::Truncated,
            adaptive: AdaptiveSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(LevyError::Config("experiment needs at least one method".into()));
        }
        for ladder in [&self.eps, &self.full_eps] {
            if ladder.is_empty() || ladder.windows(2).any(|w| w[1] >= w[0]) {
                return Err(LevyError::Config(format!("eps ladder must be non-empty and strictly decreasing, got {ladder:?}")));
            }
        }
        if self.replications < 2 {
            return Err(LevyError::Config(format!("need at least 2 replications, got {}", self.replications)));
        }
        if !(self.sample_scale > 0.0) {
            return Err(LevyError::Config(format!("sample_scale must be positive, got {}", self.sample_scale)));
        }
        if let ThetaSource::Fixed(t1, t2) = &self.theta {
            self.model.check_dim(t1)?;
            self.model.check_dim(t2)?;
        }
        Ok(())
    }

    /// Switches to the long ladder.
    pub fn full(mut self) -> Self {
        self.eps = self.full_eps.clone();
        self
    }

    pub fn estimator(&self, method: Method, eps: f64) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::new(method, eps, self.strike, self.seed);
        cfg.beta = self.beta;
        cfg.weight = self.weight;
        cfg.adaptive = self.adaptive;
        cfg.sample_scale = self.sample_scale;
        cfg.theta_mode = match (&self.theta, method.is_tilted()) {
            (_, false) => ThetaMode::Zero,
            (ThetaSource::Adaptive, true) => ThetaMode::Adaptive,
            (ThetaSource::Fixed(t1, t2), true) => ThetaMode::Constant(t1.clone(), t2.clone()),
        };
        cfg
    }

    pub fn payoff(&self) -> Arc<dyn Payoff> {
        Arc::new(CallOnSum::new(self.strike, &self.model))
    }

    /// Configured reference, or the cosine price in one dimension.
    pub fn resolve_reference(&self) -> Result<f64> {
        match self.reference {
            Some(r) => Ok(r),
            None if self.model.dim() == 1 => cos_price(&self.model, self.strike, &CosConfig::default()),
            None => Err(LevyError::Config(format!(
                "a {}-dimensional experiment needs `reference` or `reference_file`",
                self.model.dim()
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    model: PathBuf,
    methods: Vec<String>,
    eps: Option<Vec<f64>>,
    full_eps: Option<Vec<f64>>,
    beta: Option<f64>,
    #[serde(default = "thirty")]
    replications: u64,
    #[serde(default = "adaptive")]
    theta: String,
    theta1: Option<Vec<f64>>,
    theta2: Option<Vec<f64>>,
    #[serde(default)]
    seed: u64,
    output: Option<PathBuf>,
    payoff: RawPayoff,
    reference: Option<f64>,
    reference_file: Option<PathBuf>,
    sample_scale: Option<f64>,
    weight_cumulant: Option<String>,
    #[serde(default)]
    adaptive: AdaptiveSettings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPayoff {
    strike: f64,
}

fn thirty() -> u64 {
    30
}
fn adaptive() -> String {
    "adaptive".into()
}

/// Parses an experiment file; relative paths are resolved against `base`.
pub fn parse_experiment(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let raw: RawExperiment = toml::from_str(text)?;
    let model_path = base.join(&raw.model);
    let model = load_model(&model_path)?;
    let methods = raw.methods.iter().map(|m| m.parse()).collect::<Result<Vec<Method>>>()?;
    let theta = match (raw.theta.as_str(), raw.theta1, raw.theta2) {
        ("adaptive", None, None) => ThetaSource::Adaptive,
        ("adaptive", _, _) => return Err(LevyError::Config("theta1/theta2 need theta = \"fixed\"".into())),
        ("fixed", Some(t1), t2) => {
            let t2 = t2.unwrap_or_else(|| t1.clone());
            ThetaSource::Fixed(t1, t2)
        }
        ("fixed", None, _) => return Err(LevyError::Config("theta = \"fixed\" needs theta1".into())),
        (other, _, _) => return Err(LevyError::Config(format!("unknown theta source {other:?}"))),
    };
    let reference = match (raw.reference, raw.reference_file) {
        (Some(_), Some(_)) => {
            return Err(LevyError::Config("give either reference or reference_file, not both".into()))
        }
        (r, None) => r,
        (None, Some(path)) => Some(load_reference(base.join(path))?.price),
    };
    let weight = match raw.weight_cumulant.as_deref() {
        None | Some("truncated") => WeightCumulant::Truncated,
        Some("full") => WeightCumulant::Full,
        Some(other) => return Err(LevyError::Config(format!("unknown weight_cumulant {other:?}"))),
    };
    let mut cfg = ExperimentConfig::new(model, raw.payoff.strike, raw.seed);
    cfg.model_path = Some(model_path);
    cfg.methods = methods;
    if let Some(eps) = raw.eps {
        cfg.eps = eps;
    }
    if let Some(full) = raw.full_eps {
        cfg.full_eps = full;
    }
    cfg.beta = raw.beta;
    cfg.replications = raw.replications;
    cfg.theta = theta;
    cfg.output = raw.output.map(|p| base.join(p));
    cfg.reference = reference;
    cfg.sample_scale = raw.sample_scale.unwrap_or(1.0);
    cfg.weight = weight;
    cfg.adaptive = raw.adaptive;
    cfg.adaptive.gain()?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_experiment(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    parse_experiment(&std::fs::read_to_string(path)?, base)
}

/// One replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub eps: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N2")]
    pub n2: u64,
    pub replication: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub cost: u64,
    pub wall_time_s: f64,
    pub seed: u64,
}

/// Aggregate over the replications of one `(method, eps)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub eps: f64,
    pub mse: f64,
    pub mean_cpu_s: f64,
    pub mean_cost: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub reference: f64,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
    pub cells: Vec<MseSummary>,
}

fn write_all<W: Write, T: Serialize>(out: W, items: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for item in items {
        w.serialize(item)?;
    }
    w.flush()?;
    Ok(())
}

impl BenchReport {
    pub fn write_rows<W: Write>(&self, out: W) -> Result<()> {
        write_all(out, &self.rows)
    }

    pub fn write_summary<W: Write>(&self, out: W) -> Result<()> {
        write_all(out, &self.summary)
    }

    /// Writes the rows to `path` and the summary next to it as `<stem>_summary.csv`.
    pub fn save(&self, path: &Path) -> Result<PathBuf> {
        self.write_rows(std::fs::File::create(path)?)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("bench");
        let summary = path.with_file_name(format!("{stem}_summary.csv"));
        self.write_summary(std::fs::File::create(&summary)?)?;
        Ok(summary)
    }

    pub fn cell(&self, method: Method, eps: f64) -> Option<&MseSummary> {
        self.cells.iter().find(|c| c.method == method && c.eps == eps)
    }
}

/// Runs every `(method, eps)` cell; replications run concurrently and are
/// collected in replication order.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let reference = cfg.resolve_reference()?;
    let payoff = cfg.payoff();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut cells = Vec::new();
    for &method in &cfg.methods {
        for &eps in &cfg.eps {
            let est = cfg.estimator(method, eps);
            let cell = mse_over_replications(&est, &cfg.model, payoff.clone(), cfg.replications, reference)?;
            info!("{method} eps={eps:e}: mse={:.4e} mean cost={:.3e}", cell.mse, cell.mean_cost);
            for (rep, r) in cell.reports.iter().enumerate() {
                rows.push(BenchRow {
                    method: method.to_string(),
                    eps,
                    beta: r.beta,
                    n: r.n,
                    n1: r.n1,
                    n2: r.n2,
                    replication: rep as u64,
                    estimate: r.estimate,
                    stderr: r.stderr,
                    cost: r.cost,
                    wall_time_s: r.wall_time_s,
                    seed: cfg.seed,
                });
            }
            summary.push(SummaryRow {
                method: method.to_string(),
                eps,
                mse: cell.mse,
                mean_cpu_s: cell.mean_wall_time_s,
                mean_cost: cell.mean_cost,
            });
            cells.push(cell);
        }
    }
    Ok(BenchReport { reference, rows, summary, cells })
}

/// Basket-call experiment on a two-dimensional model.
pub fn benchmark_2d(cfg: &ExperimentConfig) -> Result<BenchReport> {
    if cfg.model.dim() != 2 {
        return Err(LevyError::Config(format!("benchmark_2d needs a two-dimensional model, got d = {}", cfg.model.dim())));
    }
    run_benchmark(cfg)
}

/// CPU time of two methods compared at common MSE levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchedPoint {
    pub mse: f64,
    pub cpu_a: f64,
    pub cpu_b: f64,
    pub cost_a: f64,
    pub cost_b: f64,
}

/// Piecewise log-log interpolation of `(mse, y)` pairs at `mse`.
fn interpolate(points: &[(f64, f64)], mse: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if !(x0 <= mse && mse <= x1) {
            return None;
        }
        if x1 == x0 {
            return Some(y0);
        }
        let t = (mse.ln() - x0.ln()) / (x1.ln() - x0.ln());
        Some((y0.ln() + t * (y1.ln() - y0.ln())).exp())
    })
}

/// Evaluates both methods at each MSE reached by `a` that lies inside the
/// MSE range covered by `b`.
pub fn matched_mse(report: &BenchReport, a: Method, b: Method) -> Vec<MatchedPoint> {
    let series = |m: Method| {
        let mut pts: Vec<(f64, f64, f64)> =
            report.cells.iter().filter(|c| c.method == m).map(|c| (c.mse, c.mean_wall_time_s, c.mean_cost)).collect();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        pts
    };
    let (sa, sb) = (series(a), series(b));
    let cpu_b: Vec<(f64, f64)> = sb.iter().map(|p| (p.0, p.1)).collect();
    let cost_b: Vec<(f64, f64)> = sb.iter().map(|p| (p.0, p.2)).collect();
    sa.iter()
        .filter_map(|&(mse, cpu, cost)| {
            Some(MatchedPoint { mse, cpu_a: cpu, cpu_b: interpolate(&cpu_b, mse)?, cost_a: cost, cost_b: interpolate(&cost_b, mse)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_log_interpolation() {
        let pts = [(1e-4, 10.0), (1e-2, 0.1)];
        assert!((interpolate(&pts, 1e-3).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(interpolate(&pts, 1e-1), None);
    }
}
