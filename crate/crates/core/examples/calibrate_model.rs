//! Loads a model file, imposes the martingale condition and checks it.

use levy_romberg::levy::load_model;

fn main() -> levy_romberg::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/model_1d.toml");
    let m = load_model(path)?;
    let p = m.component(0);
    println!("C={} G={} M={} Y={}", p.c(), p.g(), p.m(), p.y());
    println!("drift b = {:.12}", m.gamma(0));
    println!("kappa(1) = {:.3e}", m.cumulant(&[1.0])?);
    for eps in [1e-1, 1e-2, 1e-3] {
        println!("sigma^2({eps:e}) = {:.6e}", m.sigma_sq(eps)?);
    }
    Ok(())
}
