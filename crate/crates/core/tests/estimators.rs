mod common;

use std::sync::Arc;

use common::{call, joint_z, model_1d, tame, REFERENCE_CALL};
use levy_romberg::adaptive::{rm_run, AdaptiveTilt, GainSchedule, ProjectionBox, Target, VarianceObjective};
use levy_romberg::estimators::{
    ismc_estimate, issr_estimate, make_policy, mc_estimate, mse_over_replications, run_config, sr_estimate,
    Constant, ConstantTilt, EstimatorConfig, LogReturn, Method, MseSummary, Payoff, ThetaMode, VEpsRule,
    WeightCumulant,
};
use levy_romberg::sampler::RngStream;

#[test]
fn constant_payoff_is_exact() {
    let m = model_1d();
    let pol = make_policy(&m, 1e-2, 0.6, VEpsRule::Sigma).unwrap().with_counts(5000, 5000, 5000);
    let rng = RngStream::new(1, 0);
    let c = Constant(3.5);
    for r in [mc_estimate(&c, &m, &pol, &rng).unwrap(), sr_estimate(&c, &m, &pol, &rng).unwrap()] {
        assert_eq!(r.estimate, m.discount() * 3.5);
        assert_eq!(r.stderr, 0.0);
    }
    let sr = sr_estimate(&c, &m, &pol, &rng).unwrap();
    assert_eq!(sr.levels[1].mean, 0.0);
    assert_eq!(sr.levels[1].variance, 0.0);
}

#[test]
fn log_return_mean() {
    let m = model_1d();
    let pol = make_policy(&m, 1e-2, 0.6, VEpsRule::Sigma).unwrap().with_counts(100_000, 2, 2);
    let r = mc_estimate(&LogReturn { component: 0 }, &m, &pol, &RngStream::new(2, 0)).unwrap();
    let exact = m.discount() * m.maturity() * m.component_mean(0);
    assert!((r.estimate - exact).abs() < 3.0 * r.stderr, "{} vs {exact} ± {}", r.estimate, r.stderr);
    assert!(r.cost >= r.n);
}

#[test]
fn zero_tilt_reproduces_untilted_bit_for_bit() {
    let m = model_1d();
    let f = call(&m, 100.0);
    let pol = make_policy(&m, 1e-2, 0.6, VEpsRule::Sigma).unwrap().with_counts(20_000, 20_000, 9_000);
    let rng = RngStream::new(3, 0);
    let mc = mc_estimate(f.as_ref(), &m, &pol, &rng).unwrap();
    let ismc = ismc_estimate(f.as_ref(), &m, &pol, &mut ConstantTilt::zeros(1), WeightCumulant::Truncated, &rng).unwrap();
    assert_eq!(mc.estimate.to_bits(), ismc.estimate.to_bits());
    assert_eq!(mc.stderr.to_bits(), ismc.stderr.to_bits());
    assert_eq!(mc.cost, ismc.cost);
    let sr = sr_estimate(f.as_ref(), &m, &pol, &rng).unwrap();
    let issr = issr_estimate(
        f.as_ref(),
        &m,
        &pol,
        &mut ConstantTilt::zeros(1),
        &mut ConstantTilt::zeros(1),
        WeightCumulant::Truncated,
        &rng,
    )
    .unwrap();
    assert_eq!(sr.estimate.to_bits(), issr.estimate.to_bits());
    assert_eq!(sr.stderr.to_bits(), issr.stderr.to_bits());
    assert_eq!(sr.levels, issr.levels);
}

#[test]
fn empty_band_has_zero_correction() {
    let m = model_1d();
    let f = call(&m, 100.0);
    let pol = make_policy(&m, 1e-2, 1.0, VEpsRule::Sigma).unwrap().with_counts(2, 2000, 2000);
    let sr = sr_estimate(f.as_ref(), &m, &pol, &RngStream::new(4, 0)).unwrap();
    assert_eq!(sr.levels[1].mean, 0.0);
    assert_eq!(sr.levels[1].variance, 0.0);
}

#[test]
fn tilted_constant_payoff_averages_weights() {
    let m = tame();
    let pol = make_policy(&m, 1e-2, 0.6, VEpsRule::Sigma).unwrap().with_counts(2, 100_000, 5_000);
    let r = issr_estimate(
        &Constant(2.0),
        &m,
        &pol,
        &mut ConstantTilt(vec![1.0]),
        &mut ConstantTilt(vec![-1.0]),
        WeightCumulant::Truncated,
        &RngStream::new(5, 0),
    )
    .unwrap();
    assert_eq!(r.levels[1].mean, 0.0);
    assert_eq!(r.levels[1].variance, 0.0);
    let first = &r.levels[0];
    let se = (first.variance / first.n as f64).sqrt();
    assert!((first.mean - 2.0).abs() < 3.0 * se, "{} ± {se}", first.mean);
}

#[test]
fn unbiasedness_chain() {
    let m = model_1d();
    let f = call(&m, 100.0);
    let eps = 1e-2;
    let pol = make_policy(&m, eps, 0.64725, VEpsRule::Sigma).unwrap().with_counts(100_000, 100_000, 100_000);
    let w = WeightCumulant::Truncated;
    let reports = [
        mc_estimate(f.as_ref(), &m, &pol, &RngStream::new(10, 0)).unwrap(),
        sr_estimate(f.as_ref(), &m, &pol, &RngStream::new(11, 0)).unwrap(),
        ismc_estimate(f.as_ref(), &m, &pol, &mut ConstantTilt(vec![5.3]), w, &RngStream::new(12, 0)).unwrap(),
        issr_estimate(
            f.as_ref(),
            &m,
            &pol,
            &mut ConstantTilt(vec![5.3]),
            &mut ConstantTilt(vec![2.5]),
            w,
            &RngStream::new(13, 0),
        )
        .unwrap(),
    ];
    for a in &reports {
        for b in &reports {
            let z = joint_z(a.estimate, a.stderr, b.estimate, b.stderr);
            assert!(z < 3.0, "{} {} vs {} {}: z = {z}", a.method, a.estimate, b.method, b.estimate);
        }
    }
}

#[test]
fn full_cumulant_weight_differs_by_a_constant_factor() {
    let m = model_1d();
    let f = call(&m, 100.0);
    let pol = make_policy(&m, 1e-3, 0.64725, VEpsRule::Sigma).unwrap().with_counts(50_000, 2, 2);
    let rng = RngStream::new(14, 0);
    let a = ismc_estimate(f.as_ref(), &m, &pol, &mut ConstantTilt(vec![5.3]), WeightCumulant::Truncated, &rng).unwrap();
    let b = ismc_estimate(f.as_ref(), &m, &pol, &mut ConstantTilt(vec![5.3]), WeightCumulant::Full, &rng).unwrap();
    // Same draws; the weights differ by the constant factor e^{T(κ - κ_ε)}.
    let k = m.cumulant(&[5.3]).unwrap() - m.truncated_cumulant(1e-3, &[5.3]).unwrap();
    assert!((b.estimate / a.estimate - (m.maturity() * k).exp()).abs() < 1e-12);
}

#[test]
fn prices_match_the_cos_reference() {
    let m = model_1d();
    for method in [Method::Mc, Method::Issr] {
        let mut cfg = EstimatorConfig::new(method, 1e-3, 100.0, 21);
        if method == Method::Issr {
            cfg.theta_mode = ThetaMode::Constant(vec![5.3], vec![2.5]);
        }
        let r = run_config(&cfg, &m).unwrap();
        assert_eq!(r.n, 1894);
        assert!((r.estimate - REFERENCE_CALL).abs() < 3.0 * r.stderr, "{method}: {} ± {}", r.estimate, r.stderr);
    }
}

#[test]
fn stderr_follows_sample_size() {
    let m = model_1d();
    let f = call(&m, 100.0);
    let base = make_policy(&m, 1e-2, 0.6, VEpsRule::Sigma).unwrap();
    let small = mc_estimate(f.as_ref(), &m, &base.clone().with_counts(100_000, 2, 2), &RngStream::new(15, 0)).unwrap();
    let large = mc_estimate(f.as_ref(), &m, &base.with_counts(200_000, 2, 2), &RngStream::new(16, 0)).unwrap();
    let ratio = small.stderr.powi(2) / large.stderr.powi(2);
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "{ratio}");
}

#[test]
fn policy_counts() {
    let m = model_1d();
    let y = m.component(0).y();
    let pol = make_policy(&m, 1e-3, y / 2.0, VEpsRule::Sigma).unwrap();
    assert_eq!(pol.beta_star, 0.64725);
    assert_eq!((pol.n, pol.n1, pol.n2), (1894, 1894, 6));
    let pol = make_policy(&m, 1e-3, y / 2.0, VEpsRule::SigmaPower(0.5)).unwrap();
    assert_eq!(pol.n, pol.n1);
    assert!(pol.n < 1894);
    assert!(make_policy(&m, 1.5, 0.5, VEpsRule::Sigma).is_err());
    assert!(make_policy(&m, 1e-3, 0.0, VEpsRule::Sigma).is_err());
}

#[test]
fn adaptive_tilts_are_predictable() {
    let m = model_1d();
    let f = call(&m, 100.0);
    let eps = 1e-2;
    let obj = VarianceObjective::new(Target::V1, &m, eps, f.clone(), WeightCumulant::Truncated).unwrap();
    let bounds = ProjectionBox::theta_one(&m, 1e-2).unwrap();
    let gain = GainSchedule::default();
    let n = 3000;
    let pol = make_policy(&m, eps, 0.6, VEpsRule::Sigma).unwrap().with_counts(n, 2, 2);
    let mut driver = AdaptiveTilt::new(obj.clone(), gain, bounds.clone(), vec![0.0], RngStream::new(40, 0)).unwrap();
    let rng = RngStream::new(41, 0);
    let a = ismc_estimate(f.as_ref(), &m, &pol, &mut driver, WeightCumulant::Truncated, &rng).unwrap();
    let replay = rm_run(&obj, n, &gain, &bounds, vec![0.0], &mut RngStream::new(40, 0), true).unwrap();
    let trace = replay.trace.unwrap();
    let used: Vec<f64> = trace[..n as usize].iter().map(|t| t[0]).collect();
    assert_eq!(driver.trace().len(), n as usize);
    for (k, (x, y)) in driver.trace().iter().zip(&used).enumerate() {
        assert_eq!(x.to_bits(), y.to_bits(), "tilt of sample {k}");
    }
    assert_eq!(used[0], 0.0);
    let mut again = AdaptiveTilt::new(obj, gain, bounds, vec![0.0], RngStream::new(40, 0)).unwrap();
    let b = ismc_estimate(f.as_ref(), &m, &pol, &mut again, WeightCumulant::Truncated, &rng).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert!(a.driver_cost > 0 && a.cost > a.driver_cost);
}

#[test]
fn adaptive_estimators_are_unbiased() {
    let m = model_1d();
    let mut reports = Vec::new();
    for (method, seed) in [(Method::Mc, 50), (Method::Ismc, 51), (Method::Issr, 52)] {
        let mut cfg = EstimatorConfig::new(method, 1e-2, 100.0, seed);
        cfg.theta_mode = if method == Method::Mc { ThetaMode::Zero } else { ThetaMode::Adaptive };
        cfg.counts = Some((40_000, 40_000, 20_000));
        reports.push(run_config(&cfg, &m).unwrap());
    }
    let mc = &reports[0];
    for r in &reports[1..] {
        let z = joint_z(r.estimate, r.stderr, mc.estimate, mc.stderr);
        assert!(z < 3.0, "{}: {} vs {}", r.method, r.estimate, mc.estimate);
        assert!(r.stderr < mc.stderr);
    }
}

#[test]
fn mse_of_an_exact_method_is_zero() {
    let m = model_1d();
    let mut cfg = EstimatorConfig::new(Method::Sr, 1e-2, 100.0, 7);
    cfg.counts = Some((100, 100, 100));
    let c: Arc<dyn Payoff> = Arc::new(Constant(4.0));
    let s = mse_over_replications(&cfg, &m, c, 30, m.discount() * 4.0).unwrap();
    assert_eq!(s.mse, 0.0);
    assert_eq!(s.reports.len(), 30);
}

#[test]
fn mse_decomposes_into_bias_and_variance() {
    let m = model_1d();
    let mut cfg = EstimatorConfig::new(Method::Mc, 1e-2, 100.0, 8);
    cfg.counts = Some((4000, 4000, 4000));
    let s: MseSummary = mse_over_replications(&cfg, &m, call(&m, 100.0), 30, REFERENCE_CALL).unwrap();
    let sq: Vec<f64> = s.reports.iter().map(|r| (REFERENCE_CALL - r.estimate).powi(2)).collect();
    let n = sq.len() as f64;
    let sd = (sq.iter().map(|v| (v - s.mse).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let predicted = s.mean_stderr_sq + (s.mean_estimate - REFERENCE_CALL).powi(2);
    assert!((s.mse - predicted).abs() < 4.0 * sd / n.sqrt(), "{} vs {predicted}", s.mse);
    let seeds: Vec<u64> = s.reports.iter().map(|r| r.seed).collect();
    assert!(seeds.iter().all(|&x| x == 8));
    let distinct: std::collections::BTreeSet<u64> = s.reports.iter().map(|r| r.estimate.to_bits()).collect();
    assert_eq!(distinct.len(), 30);
}
