use levy_romberg::cos::{char_fn, char_fn_complex, cos_call_direct, cos_price, cos_price_diagnostics, cos_put, CosConfig};
use levy_romberg::levy::{CgmyParams, MarketModel};
use levy_romberg::sampler::{RngStream, TruncatedModel};
use levy_romberg::stats::Welford;
use num_complex::Complex64;

/// Carr–Madan damped Fourier integral (α = 1.5) at 30 digits with mpmath.
const REFERENCE_CALL: f64 = 13.414_066_172_799_06;

fn model_1d() -> MarketModel {
    let p = CgmyParams::new(0.0244, 0.0765, 7.5515, 1.2945).unwrap();
    MarketModel::calibrated(vec![p], 1.1f64.ln(), vec![100.0], 1.0).unwrap()
}

fn tame() -> MarketModel {
    let p = CgmyParams::new(0.5, 2.0, 5.0, 0.9).unwrap();
    MarketModel::calibrated(vec![p], 0.05, vec![100.0], 1.0).unwrap()
}

#[test]
fn char_fn_identities() {
    for m in [model_1d(), tame()] {
        assert_eq!(char_fn(&m, 0.0), Complex64::new(1.0, 0.0));
        let at_minus_i = char_fn_complex(&m, Complex64::new(0.0, -1.0));
        assert!((at_minus_i - 1.0).norm() < 1e-12, "{at_minus_i}");
        for k in -30..=30 {
            let u = 10f64.powf(k as f64 / 10.0);
            assert!(char_fn(&m, u).norm() <= 1.0 + 1e-14);
            assert!(char_fn(&m, -u).norm() <= 1.0 + 1e-14);
        }
    }
}

#[test]
fn matches_independent_fourier_integral() {
    let m = model_1d();
    let d = cos_price_diagnostics(&m, 100.0, &CosConfig::default()).unwrap();
    assert!((d.price - REFERENCE_CALL).abs() < 1e-9, "{}", d.price);
    assert!(d.change_on_doubling() < 1e-8);
    assert!(d.a < 0.0 && d.b > 0.0);
}

#[test]
fn stable_under_range_perturbation() {
    let m = model_1d();
    let base = cos_price(&m, 100.0, &CosConfig::default()).unwrap();
    for range_width in [8.0, 12.0] {
        for tail_tol in [1e-9, 1e-12] {
            let cfg = CosConfig { n_terms: 1 << 15, range_width, tail_tol };
            let p = cos_price(&m, 100.0, &cfg).unwrap();
            assert!((p - base).abs() < 1e-8, "width {range_width}, tol {tail_tol}: {p} vs {base}");
        }
    }
}

#[test]
fn put_call_parity() {
    for m in [model_1d(), tame()] {
        for strike in [60.0, 100.0, 140.0] {
            let cfg = CosConfig::default();
            let call = cos_call_direct(&m, strike, &cfg).unwrap();
            let put = cos_put(&m, strike, &cfg).unwrap();
            let parity = m.s0()[0] - m.discount() * strike;
            assert!((call - put - parity).abs() < 1e-8, "K={strike}: {}", call - put - parity);
        }
    }
}

#[test]
fn self_convergence_is_monotone() {
    let m = model_1d();
    let p = |n| cos_price(&m, 100.0, &CosConfig::with_terms(n)).unwrap();
    let gaps: Vec<f64> = [64, 128, 256, 512].iter().map(|&n| (p(2 * n) - p(n)).abs()).collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}

#[test]
fn tiny_strike_gives_spot() {
    let m = model_1d();
    let p = cos_price(&m, 1e-6, &CosConfig::default()).unwrap();
    assert!((p - 100.0).abs() < 1e-5, "{p}");
}

#[test]
fn no_arbitrage_shape_in_strike() {
    let m = model_1d();
    let cfg = CosConfig::default();
    let strikes: Vec<f64> = (0..25).map(|k| 50.0 + 5.0 * k as f64).collect();
    let prices: Vec<f64> = strikes.iter().map(|&k| cos_price(&m, k, &cfg).unwrap()).collect();
    for w in prices.windows(2) {
        assert!(w[1] <= w[0] + 1e-8);
    }
    for w in prices.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8);
    }
}

#[test]
fn char_fn_matches_simulation() {
    let m = model_1d();
    let tm = TruncatedModel::new(&m, 1e-4).unwrap();
    let mut rng = RngStream::new(5, 0);
    let xs: Vec<f64> = (0..20_000).map(|_| tm.sample_terminal(&mut rng).value[0]).collect();
    for u in [0.5, 1.0, 2.0] {
        let re: Welford = xs.iter().map(|x| (u * x).cos()).collect();
        let im: Welford = xs.iter().map(|x| (u * x).sin()).collect();
        let phi = char_fn(&m, u);
        assert!((re.mean() - phi.re).abs() < 4.0 * re.stderr(), "u={u}: {} vs {}", re.mean(), phi.re);
        assert!((im.mean() - phi.im).abs() < 4.0 * im.stderr(), "u={u}: {} vs {}", im.mean(), phi.im);
    }
}
