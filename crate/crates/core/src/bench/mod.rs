//! Experiment harness: replicated MSE studies, cost analytics and
//! reference runs.

mod complexity;
mod experiment;
mod reference;

pub use complexity::{
    complexity_ratio, optimal_beta, predicted_costs, proposals_per_path, ComplexityModel, CostPrediction,
};
pub use experiment::{
    benchmark_2d, load_experiment, matched_mse, parse_experiment, run_benchmark, BenchReport, BenchRow,
    ExperimentConfig, MatchedPoint, SummaryRow, ThetaSource, DEFAULT_LADDER, FULL_LADDER,
};
pub use reference::{load_reference, make_reference, save_reference, ReferenceRecord, ReferenceSettings};

use crate::error::{LevyError, Result};

/// Sizes the global thread pool from `LEVY_ROMBERG_THREADS` when set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(v) = std::env::var("LEVY_ROMBERG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| LevyError::Config(format!("LEVY_ROMBERG_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(LevyError::Config("LEVY_ROMBERG_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LevyError::Config(format!("cannot size thread pool: {e}")))
}
