#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod bench;
pub mod cos;
pub mod error;
pub mod estimators;
pub mod levy;
pub mod quad;
pub mod sampler;
pub mod stats;

pub use error::{LevyError, Result};
