mod common;

use std::sync::Arc;

use common::{call, model_1d};
use levy_romberg::adaptive::{
    argmin, h_function, rm_run, rm_step, tensor_grid, variance_surface, GainSchedule, ProjectionBox, RmState,
    SharedDraws, Target, VarianceObjective,
};
use levy_romberg::estimators::{mc_estimate, make_policy, Constant, Payoff, VEpsRule, WeightCumulant};
use levy_romberg::sampler::RngStream;
use proptest::prelude::*;
use rand::Rng;

fn objective(target: Target, eps: f64) -> VarianceObjective {
    let m = model_1d();
    VarianceObjective::new(target, &m, eps, call(&m, 100.0), WeightCumulant::Truncated).unwrap()
}

proptest! {
    #[test]
    fn projection_is_idempotent(lo in -5.0..-0.01f64, hi in 0.01..5.0f64, x in -20.0..20.0f64, y in -20.0..20.0f64) {
        let b = ProjectionBox::new(vec![lo, lo], vec![hi, hi]).unwrap();
        let mut p = vec![x, y];
        b.project(&mut p);
        prop_assert!(b.contains(&p));
        let mut q = p.clone();
        b.project(&mut q);
        prop_assert_eq!(&p, &q);
        if b.contains(&[x, y]) {
            prop_assert_eq!(p, vec![x, y]);
        }
    }
}

#[test]
fn gain_conditions() {
    let g = GainSchedule::default();
    let partial = |n: u64| (1..=n).map(|k| g.gain(k)).sum::<f64>();
    let partial_sq = |n: u64| (1..=n).map(|k| g.gain(k).powi(2)).sum::<f64>();
    assert!(partial(1_000_000) - partial(10_000) > 4.0);
    assert!(partial_sq(1_000_000) - partial_sq(10_000) < 1e-4);
    assert!(partial_sq(1_000_000) < g.g0 * g.g0 / g.n0);
    assert!(GainSchedule::new(0.0, 1.0).is_err());
}

#[test]
fn boxes_contain_the_origin_and_respect_the_tilt_sets() {
    let m = model_1d();
    let one = ProjectionBox::theta_one(&m, 1e-2).unwrap();
    assert!(one.contains(&[0.0]) && one.contains(&[5.3]) && !one.contains(&[7.6]));
    let q = ProjectionBox::theta_q(&m, 3.0, 1e-2).unwrap();
    for t in [q.lower()[0], q.upper()[0]] {
        assert!(m.theta_q_contains(3.0, &[t]).unwrap());
        assert!(m.in_theta_one(&[t]));
    }
    assert!(ProjectionBox::new(vec![0.5], vec![1.0]).is_err());
    assert!(ProjectionBox::new(vec![-10.0], vec![1.0]).unwrap().check_inside(&m).is_err());
}

#[test]
fn h_vanishes_on_zero_payoff_and_at_the_mean() {
    let m = model_1d();
    let zero: Arc<dyn Payoff> = Arc::new(Constant(0.0));
    let obj = VarianceObjective::new(Target::V1, &m, 1e-2, zero, WeightCumulant::Truncated).unwrap();
    assert_eq!(h_function(&obj, &[2.0], &[0.3]).unwrap(), vec![0.0]);
    let obj = objective(Target::V1, 1e-2);
    let theta = 3.0;
    let x = obj.sampler().horizon() * obj.sampler().grad_cumulant(&[theta]).unwrap()[0];
    assert_eq!(h_function(&obj, &[theta], &[x]).unwrap(), vec![0.0]);
    assert!(h_function(&obj, &[8.0], &[0.0]).is_err());
    assert!(h_function(&obj, &[-0.1], &[0.0]).is_err());
}

#[test]
fn zero_payoff_never_moves() {
    let m = model_1d();
    let zero: Arc<dyn Payoff> = Arc::new(Constant(0.0));
    let obj = VarianceObjective::new(Target::V2, &m, 1e-2, zero, WeightCumulant::Truncated).unwrap();
    let b = ProjectionBox::theta_one(&m, 1e-2).unwrap();
    let st = rm_run(&obj, 2000, &GainSchedule::default(), &b, vec![1.5], &mut RngStream::new(1, 0), true).unwrap();
    assert!(st.trace.unwrap().iter().all(|t| t[0] == 1.5));
    assert_eq!(st.n, 2000);
}

#[test]
fn steps_are_clamped_into_the_box() {
    let obj = objective(Target::V1, 1e-2);
    let b = ProjectionBox::new(vec![-0.05], vec![1.0]).unwrap();
    let huge = GainSchedule::new(1e6, 0.0).unwrap();
    let st = RmState::new(vec![0.5], Target::V1, 1e-2, false);
    // A large positive log-return makes H strongly negative, so θ jumps up.
    let next = rm_step(&st, &[2.0], &huge, &b, &obj).unwrap();
    assert_eq!(next.theta, vec![1.0]);
    let mut rng = RngStream::new(2, 0);
    let mut st = RmState::new(vec![0.0], Target::V1, 1e-2, false);
    let mut x = [0.0];
    for _ in 0..500 {
        x[0] = rng.random_range(-3.0..3.0);
        st = rm_step(&st, &x, &huge, &b, &obj).unwrap();
        assert!(b.contains(&st.theta));
    }
}

#[test]
fn surface_at_zero_is_the_plain_moment() {
    let m = model_1d();
    let obj = objective(Target::V1, 1e-2);
    let rng = RngStream::new(3, 0);
    let pts = variance_surface(&obj, &[vec![0.0]], 50_000, &rng).unwrap();
    let sq: Arc<dyn Payoff> = Arc::new(levy_romberg::estimators::CustomPayoff::new(
        "squared call",
        {
            let f = call(&m, 100.0);
            move |x: &[f64]| f.evaluate(x).powi(2)
        },
        |_: &[f64], out: &mut [f64]| out.fill(0.0),
    ));
    let pol = make_policy(&m, 1e-2, 0.6, VEpsRule::Sigma).unwrap().with_counts(50_000, 2, 2);
    // Same stream layout, hence the same draws.
    let r = mc_estimate(sq.as_ref(), &m, &pol, &rng).unwrap();
    let moment = r.estimate / m.discount();
    assert!((pts[0].value / moment - 1.0).abs() < 1e-10, "{} vs {moment}", pts[0].value);
    assert!(variance_surface(&obj, &[vec![7.6]], 10, &rng).is_err());
}

#[test]
fn gradient_identity() {
    let mut pick = RngStream::new(4, 0);
    for target in [Target::V1, Target::V2] {
        let obj = objective(target, 1e-2);
        let draws = SharedDraws::draw(&obj, 200_000, &RngStream::new(5, 0));
        for _ in 0..5 {
            let theta = pick.random_range(0.2..7.0);
            let (h, se) = draws.h_mean_at(&obj, &[theta]).unwrap();
            let d = 1e-3;
            let (fd, fd_se) = draws
                .combination_at(&obj, &[(vec![theta + d], 0.5 / d), (vec![theta - d], -0.5 / d)])
                .unwrap();
            assert!((h[0] - fd).abs() < 3.0 * se[0].max(fd_se), "{target:?} θ={theta}: {} vs {fd}", h[0]);
        }
    }
}

#[test]
fn surface_is_convex_and_mean_reverting() {
    for target in [Target::V1, Target::V2] {
        let obj = objective(target, 1e-2);
        let grid = tensor_grid(&[0.0], &[7.5], 31);
        let rng = RngStream::new(6, 0);
        let draws = SharedDraws::draw(&obj, 200_000, &rng);
        for w in grid.windows(3) {
            let (second, se) = draws
                .combination_at(&obj, &[(w[0].clone(), 1.0), (w[1].clone(), -2.0), (w[2].clone(), 1.0)])
                .unwrap();
            assert!(second > -2.0 * se, "{target:?} at {:?}: {second} ± {se}", w[1]);
        }
        let pts = variance_surface(&obj, &grid, 200_000, &rng).unwrap();
        let best = argmin(&pts).unwrap().theta[0];
        for theta in [0.5, 1.5, 7.0] {
            if (theta - best).abs() < 1.0 {
                continue;
            }
            let (h, se) = draws.h_mean_at(&obj, &[theta]).unwrap();
            let z = h[0] * (theta - best) / (se[0] * (theta - best).abs());
            assert!(z > 2.33, "{target:?} at {theta}: z = {z}");
        }
    }
}

#[test]
fn terminal_iterates_settle_as_the_cutoff_shrinks() {
    let m = model_1d();
    let b = ProjectionBox::theta_one(&m, 1e-2).unwrap();
    let mut means = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3] {
        let obj = objective(Target::V2, eps);
        let mut sum = 0.0;
        for seed in 0..4 {
            let st = rm_run(&obj, 50_000, &GainSchedule::default(), &b, vec![0.0], &mut RngStream::new(70 + seed, 0), false)
                .unwrap();
            sum += st.theta[0];
        }
        means.push(sum / 4.0);
    }
    let (d1, d2) = ((means[1] - means[0]).abs(), (means[2] - means[1]).abs());
    assert!(d2 < d1, "{means:?}");
}
