//! Monte Carlo, statistical Romberg and their importance-sampled variants.

mod config;
mod driver;
mod mse;
mod payoff;
mod policy;
mod report;
mod run;

pub use config::{
    build_drivers, load_estimator, parse_estimator, run_config, run_estimator, AdaptiveSettings, EstimatorConfig, ThetaMode,
};
pub use driver::{ConstantTilt, TiltDriver, WeightCumulant};
pub use mse::{mse_over_replications, replication_stream, MseSummary};
pub use payoff::{CallOnSum, Constant, CustomPayoff, LogReturn, Payoff, PayoffKind};
pub use policy::{make_policy, SampleSizePolicy, VEpsRule};
pub use report::{EstimatorReport, LevelSummary, Method, ReportRow};
pub use run::{chunks, ismc_estimate, issr_estimate, mc_estimate, sr_estimate, CHUNK};

