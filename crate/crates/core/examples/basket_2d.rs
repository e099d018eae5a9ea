//! Basket call on two independent CGMY assets, with the stored reference.

use levy_romberg::bench::load_reference;
use levy_romberg::estimators::{run_config, EstimatorConfig, Method, ThetaMode};
use levy_romberg::levy::load_model;

fn main() -> levy_romberg::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let m = load_model(format!("{dir}/configs/model_2d.toml"))?;
    let reference = load_reference(format!("{dir}/fixtures/reference_2d.toml"))?;
    println!("reference {:.4} ± {:.4} (eps {:e}, N {})", reference.price, reference.stderr, reference.eps, reference.n);
    for method in Method::ALL {
        let mut cfg = EstimatorConfig::new(method, 1e-3, 200.0, 4);
        if method.is_tilted() {
            cfg.theta_mode = ThetaMode::Constant(vec![4.0, 3.5], vec![3.5, 1.1]);
        }
        let r = run_config(&cfg, &m)?;
        println!("{:<4} {:.4} ± {:.4}  cost {}", r.method, r.estimate, r.stderr, r.cost);
    }
    Ok(())
}
