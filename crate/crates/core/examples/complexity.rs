//! Predicted and measured proposal counts of plain and Romberg Monte Carlo.

use levy_romberg::bench::{complexity_ratio, optimal_beta, predicted_costs, ComplexityModel};
use levy_romberg::estimators::{make_policy, mc_estimate, sr_estimate, CallOnSum, VEpsRule};
use levy_romberg::levy::load_model;
use levy_romberg::sampler::RngStream;

fn main() -> levy_romberg::Result<()> {
    let m = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/model_1d.toml"))?;
    let y = m.component(0).y();
    let beta = optimal_beta(y);
    let (a, b) = ComplexityModel::new(y, beta, 1e-3)?.exponents();
    println!("beta* = {beta}, exponents ({a:.5}, {b:.5})");
    let payoff = CallOnSum::new(100.0, &m);
    println!("eps      model   predicted  measured");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let pol = make_policy(&m, eps, beta, VEpsRule::Sigma)?;
        let rng = RngStream::new(5, 0);
        let mc = mc_estimate(&payoff, &m, &pol, &rng)?.cost as f64;
        let sr = sr_estimate(&payoff, &m, &pol, &rng)?.cost as f64;
        let pred = predicted_costs(&m, eps, beta)?;
        println!("{eps:<8e} {:.4}  {:.4}     {:.4}", complexity_ratio(y, beta, eps)?, pred.ratio(), sr / mc);
    }
    Ok(())
}
