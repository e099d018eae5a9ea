use std::io::Write;

use super::surface::SurfacePoint;
use crate::error::Result;

fn theta_header(d: usize) -> impl Iterator<Item = String> {
    (1..=d).map(|j| format!("theta{j}"))
}

/// Iterate trace as `n,theta1,...`; row `n` holds the tilt after `n` steps.
pub fn write_trace_csv<W: Write>(trace: &[Vec<f64>], out: W) -> Result<()> {
    let d = trace.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("n".to_string()).chain(theta_header(d)))?;
    for (n, theta) in trace.iter().enumerate() {
        w.write_record(std::iter::once(n.to_string()).chain(theta.iter().map(f64::to_string)))?;
    }
    w.flush()?;
    Ok(())
}

/// Surface as `theta1,...,v_hat,stderr`.
pub fn write_surface_csv<W: Write>(points: &[SurfacePoint], out: W) -> Result<()> {
    let d = points.first().map_or(0, |p| p.theta.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(theta_header(d).chain(["v_hat".to_string(), "stderr".to_string()]))?;
    for p in points {
        w.write_record(
            p.theta.iter().map(f64::to_string).chain([p.value.to_string(), p.stderr.to_string()]),
        )?;
    }
    w.flush()?;
    Ok(())
}
