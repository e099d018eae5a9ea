//! Projected Robbins–Monro search for variance-minimising Esscher tilts.

mod driver;
mod output;
mod projection;
pub(crate) mod rm;
mod surface;

pub use driver::AdaptiveTilt;
pub use output::{write_surface_csv, write_trace_csv};
pub use projection::{GainSchedule, ProjectionBox};
pub use rm::{h_function, rm_run, rm_step, RmState, Target, VarianceObjective};
pub use surface::{argmin, tensor_grid, variance_surface, SharedDraws, SurfacePoint};
