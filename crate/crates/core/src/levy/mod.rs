//! Analytic layer for CGMY Lévy measures and exponential Lévy markets.

pub mod cgmy;
pub mod config;
pub mod market;

pub use cgmy::{upper_gamma, CgmyParams, Side};
pub use config::{load_model, parse_model};
pub use market::{gaussian_approx_valid, GaussianApprox, MarketModel, TiltVector};
