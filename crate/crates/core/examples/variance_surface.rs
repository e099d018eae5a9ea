//! Scans both variance objectives on a grid and writes them as CSV.

use std::sync::Arc;

use levy_romberg::adaptive::{argmin, tensor_grid, variance_surface, write_surface_csv, Target, VarianceObjective};
use levy_romberg::estimators::{CallOnSum, WeightCumulant};
use levy_romberg::levy::load_model;
use levy_romberg::sampler::RngStream;

fn main() -> levy_romberg::Result<()> {
    let m = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/model_1d.toml"))?;
    let grid = tensor_grid(&[0.0], &[7.5], 31);
    for target in [Target::V1, Target::V2] {
        let obj = VarianceObjective::new(target, &m, 1e-2, Arc::new(CallOnSum::new(100.0, &m)), WeightCumulant::Truncated)?;
        let pts = variance_surface(&obj, &grid, 100_000, &RngStream::new(3, 0))?;
        let best = argmin(&pts).expect("non-empty grid");
        println!("{target:?}: argmin {:.2}, value {:.4e}", best.theta[0], best.value);
        write_surface_csv(&pts, std::io::stdout().lock())?;
    }
    Ok(())
}
