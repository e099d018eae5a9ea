//! Learns both variance-minimising tilts by projected Robbins–Monro.

use levy_romberg::adaptive::{rm_run, GainSchedule, ProjectionBox, Target, VarianceObjective};
use levy_romberg::estimators::{CallOnSum, WeightCumulant};
use levy_romberg::levy::load_model;
use levy_romberg::sampler::RngStream;
use std::sync::Arc;

fn main() -> levy_romberg::Result<()> {
    let m = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/model_1d.toml"))?;
    let bounds = ProjectionBox::theta_one(&m, 1e-2)?;
    for target in [Target::V1, Target::V2] {
        let obj = VarianceObjective::new(target, &m, 1e-3, Arc::new(CallOnSum::new(100.0, &m)), WeightCumulant::Truncated)?;
        let st = rm_run(&obj, 50_000, &GainSchedule::default(), &bounds, vec![0.0], &mut RngStream::new(1, 0), true)?;
        let trace = st.trace.unwrap_or_default();
        for n in [100, 1_000, 10_000, 50_000] {
            println!("{target:?} after {n:>6}: theta = {:.4}", trace[n][0]);
        }
    }
    Ok(())
}
