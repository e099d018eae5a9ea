//! Prices the at-the-money call with all four estimators and the cosine
//! expansion.

use levy_romberg::cos::{cos_price, CosConfig};
use levy_romberg::estimators::{run_config, EstimatorConfig, Method, ThetaMode};
use levy_romberg::levy::load_model;

fn main() -> levy_romberg::Result<()> {
    let m = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/model_1d.toml"))?;
    let reference = cos_price(&m, 100.0, &CosConfig::default())?;
    println!("COS         {reference:.6}");
    for method in Method::ALL {
        let mut cfg = EstimatorConfig::new(method, 1e-2, 100.0, 1);
        cfg.sample_scale = 20.0;
        if method.is_tilted() {
            cfg.theta_mode = ThetaMode::Constant(vec![5.3], vec![2.5]);
        }
        let r = run_config(&cfg, &m)?;
        println!("{:<4} eps=1e-2 {:.6} ± {:.6}  cost {}", r.method, r.estimate, r.stderr, r.cost);
    }
    Ok(())
}
