//! Small replicated MSE study of the four estimators against the cosine
//! price.

use levy_romberg::bench::{matched_mse, run_benchmark, ExperimentConfig, ThetaSource};
use levy_romberg::estimators::Method;
use levy_romberg::levy::load_model;

fn main() -> levy_romberg::Result<()> {
    let m = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/model_1d.toml"))?;
    let mut cfg = ExperimentConfig::new(m, 100.0, 1);
    cfg.eps = vec![1e-1, 1e-2];
    cfg.replications = 10;
    cfg.theta = ThetaSource::Fixed(vec![5.3], vec![2.5]);
    let report = run_benchmark(&cfg)?;
    println!("reference {:.8}", report.reference);
    report.write_summary(std::io::stdout().lock())?;
    for p in matched_mse(&report, Method::Issr, Method::Ismc) {
        println!("mse {:.3e}: ISSR {:.3e} s, ISMC {:.3e} s", p.mse, p.cpu_a, p.cpu_b);
    }
    Ok(())
}
