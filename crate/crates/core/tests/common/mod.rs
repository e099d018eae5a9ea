#![allow(dead_code)]

use std::sync::Arc;

use levy_romberg::estimators::{CallOnSum, Payoff};
use levy_romberg::levy::{CgmyParams, MarketModel};

/// Self-converged COS price of the at-the-money call, confirmed by a
/// Carr–Madan integral at 30 digits.
pub const REFERENCE_CALL: f64 = 13.414_066_172_799_06;

pub fn model_1d() -> MarketModel {
    let p = CgmyParams::new(0.0244, 0.0765, 7.5515, 1.2945).unwrap();
    MarketModel::calibrated(vec![p], 1.1f64.ln(), vec![100.0], 1.0).unwrap()
}

pub fn model_2d() -> MarketModel {
    let a = CgmyParams::new(0.0244, 0.0765, 7.55015, 0.9).unwrap();
    let b = CgmyParams::new(0.0244, 2.0, 5.0, 0.9).unwrap();
    MarketModel::calibrated(vec![a, b], 1.1f64.ln(), vec![100.0, 100.0], 1.0).unwrap()
}

pub fn tame() -> MarketModel {
    let p = CgmyParams::new(0.5, 2.0, 5.0, 0.9).unwrap();
    MarketModel::calibrated(vec![p], 0.05, vec![100.0], 1.0).unwrap()
}

pub fn call(m: &MarketModel, strike: f64) -> Arc<dyn Payoff> {
    Arc::new(CallOnSum::new(strike, m))
}

/// `|a - b|` in units of the joint standard error.
pub fn joint_z(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    (a - b).abs() / (sa * sa + sb * sb).sqrt()
}
