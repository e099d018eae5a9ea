use crate::error::Result;
use crate::estimators::TiltDriver;
use crate::sampler::RngStream;

use super::projection::{GainSchedule, ProjectionBox};
use super::rm::{RmState, VarianceObjective};

/// Tilt driver that advances a projected Robbins–Monro recursion by one
/// step per consumed sample, using its own stream of untilted draws.
#[derive(Clone)]
pub struct AdaptiveTilt {
    obj: VarianceObjective,
    gain: GainSchedule,
    bounds: ProjectionBox,
    state: RmState,
    rng: RngStream,
    trace: Vec<f64>,
    cost: u64,
    x: Vec<f64>,
    h: Vec<f64>,
    scratch: Vec<f64>,
}

impl AdaptiveTilt {
    pub fn new(
        obj: VarianceObjective,
        gain: GainSchedule,
        bounds: ProjectionBox,
        theta0: Vec<f64>,
        rng: RngStream,
    ) -> Result<Self> {
        bounds.check_inside(obj.sampler().model())?;
        let d = obj.dim();
        let state = RmState::new(theta0, obj.target(), obj.sampler().eps(), false);
        Ok(Self {
            obj,
            gain,
            bounds,
            state,
            rng,
            trace: Vec::new(),
            cost: 0,
            x: vec![0.0; d],
            h: vec![0.0; d],
            scratch: vec![0.0; d],
        })
    }

    /// Tilts handed out so far, flattened (`dim` entries per sample).
    pub fn trace(&self) -> &[f64] {
        &self.trace
    }

    pub fn state(&self) -> &RmState {
        &self.state
    }
}

impl TiltDriver for AdaptiveTilt {
    fn theta(&self) -> &[f64] {
        &self.state.theta
    }

    fn advance(&mut self) -> Result<()> {
        self.trace.extend_from_slice(&self.state.theta);
        let c = self.obj.sampler().fill(None, &mut self.x, &mut self.rng);
        self.cost += c.simulated;
        self.state.step(&self.x, &self.gain, &self.bounds, &self.obj, &mut self.h, &mut self.scratch)
    }

    fn is_constant(&self) -> bool {
        false
    }

    fn cost(&self) -> u64 {
        self.cost
    }
}
