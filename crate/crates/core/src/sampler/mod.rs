//! Simulation of truncated, tilted and two-level coupled terminal values.

mod rng;
mod truncated;

pub use rng::RngStream;
pub use truncated::{
    propose_jump, sample_coupled, sample_positive_jump, sample_terminal, sample_tilted_coupled,
    sample_tilted_terminal, CoupledSample, CoupledSampler, JumpCount, TerminalSample, TruncatedModel,
};
