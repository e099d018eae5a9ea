//! One-dimensional CGMY Lévy measures.
//!
//! `ν(dx) = C e^{-Mx} x^{-1-Y} dx` on `x > 0` and `C e^{-G|x|} |x|^{-1-Y} dx`
//! on `x < 0`. Everything that depends on a single component lives here:
//! the closed-form cumulant pieces, truncated moments (quadrature reference
//! and incomplete-gamma fast path), the Esscher tilt and the admissible
//! tilt sets.

use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{domain, LevyError, Result};
use crate::quad::{exp_rem2, integrate, integrate_to_infinity, QuadTol};

/// Parameters of a single CGMY component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgmyParams {
    c: f64,
    g: f64,
    m: f64,
    y: f64,
}

/// Which half-line of the Lévy measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl CgmyParams {
    pub fn new(c: f64, g: f64, m: f64, y: f64) -> Result<Self> {
        let finite = c.is_finite() && g.is_finite() && m.is_finite() && y.is_finite();
        if !finite || c <= 0.0 || g <= 0.0 || m <= 0.0 {
            return Err(LevyError::InvalidParams(format!(
                "CGMY requires C, G, M > 0 (got C={c}, G={g}, M={m})"
            )));
        }
        if !(y > 0.0 && y < 2.0) || y == 1.0 {
            return Err(LevyError::InvalidParams(format!(
                "Y must lie in (0,1) or (1,2), got {y}"
            )));
        }
        Ok(Self { c, g, m, y })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn y(&self) -> f64 {
        self.y
    }

    /// True in the infinite-variation regime `1 < Y < 2`.
    pub fn infinite_variation(&self) -> bool {
        self.y > 1.0
    }

    /// Tempering rate of the given side (`M` on the right, `G` on the left).
    pub fn rate(&self, side: Side) -> f64 {
        match side {
            Side::Positive => self.m,
            Side::Negative => self.g,
        }
    }

    /// Lévy density at `x ≠ 0`.
    pub fn levy_density(&self, x: f64) -> Result<f64> {
        if x == 0.0 || !x.is_finite() {
            return domain("Lévy density is singular at the origin");
        }
        let rate = if x > 0.0 { self.m } else { self.g };
        let ax = x.abs();
        Ok(self.c * (-rate * ax).exp() / ax.powf(1.0 + self.y))
    }

    /// `Γ(-Y)` through `Γ(2-Y) / (Y (Y-1))`.
    pub fn gamma_neg_y(&self) -> f64 {
        gamma(2.0 - self.y) / (self.y * (self.y - 1.0))
    }

    /// Open interval `(-G, M)` of tilts with finite exponential moments.
    pub fn in_theta_one(&self, theta: f64) -> bool {
        theta > -self.g && theta < self.m
    }

    fn check_theta_one(&self, theta: f64) -> Result<()> {
        if self.in_theta_one(theta) {
            Ok(())
        } else {
            domain(format!(
                "tilt {theta} outside (-G, M) = ({}, {})",
                -self.g, self.m
            ))
        }
    }

    /// Esscher tilt: `e^{θx} ν(dx)` is CGMY with `(C, G+θ, M-θ, Y)`.
    pub fn esscher_tilt(&self, theta: f64) -> Result<Self> {
        self.check_theta_one(theta)?;
        Ok(Self {
            c: self.c,
            g: self.g + theta,
            m: self.m - theta,
            y: self.y,
        })
    }

    /// Membership in `Θ_q`: `∫_{|x|>1} |x|^{2q} e^{-qθx} ν(dx) < ∞`, i.e.
    /// `-M/q < θ < G/q`.
    pub fn theta_q_contains(&self, q: f64, theta: f64) -> bool {
        q * theta > -self.m && q * theta < self.g
    }

    /// Closed-form compensated cumulant without drift: `∫(e^{θx}-1-θx)ν(dx)`
    /// for `Y > 1`, `∫(e^{θx}-1)ν(dx)` for `Y < 1`.
    pub fn closed_cgf(&self, theta: f64) -> Result<f64> {
        self.check_theta_one(theta)?;
        let (c, g, m, y) = (self.c, self.g, self.m, self.y);
        let mut pos = m.powf(y) * ((1.0 - theta / m).powf(y) - 1.0);
        let mut neg = g.powf(y) * ((1.0 + theta / g).powf(y) - 1.0);
        if self.infinite_variation() {
            pos += m.powf(y) * theta * y / m;
            neg -= g.powf(y) * theta * y / g;
        }
        Ok(c * self.gamma_neg_y() * (pos + neg))
    }

    /// Derivative of [`closed_cgf`](Self::closed_cgf).
    pub fn closed_cgf_grad(&self, theta: f64) -> Result<f64> {
        self.check_theta_one(theta)?;
        let (c, g, m, y) = (self.c, self.g, self.m, self.y);
        let mut v = -y * m.powf(y - 1.0) * (1.0 - theta / m).powf(y - 1.0)
            + y * g.powf(y - 1.0) * (1.0 + theta / g).powf(y - 1.0);
        if self.infinite_variation() {
            v += y * m.powf(y - 1.0) - y * g.powf(y - 1.0);
        }
        Ok(c * self.gamma_neg_y() * v)
    }

    /// Second derivative: `C Γ(2-Y) [(M-θ)^{Y-2} + (G+θ)^{Y-2}]`.
    pub fn closed_cgf_hess(&self, theta: f64) -> Result<f64> {
        self.check_theta_one(theta)?;
        Ok(self.c
            * gamma(2.0 - self.y)
            * ((self.m - theta).powf(self.y - 2.0) + (self.g + theta).powf(self.y - 2.0)))
    }

    /// Closed-form cumulant without drift at a complex argument `z` with
    /// `-G < Re z < M`, on the principal branch.
    pub fn closed_cgf_complex(&self, z: Complex64) -> Complex64 {
        let (c, g, m, y) = (self.c, self.g, self.m, self.y);
        let one = Complex64::new(1.0, 0.0);
        let mut pos = (one - z / m).powf(y) - one;
        let mut neg = (one + z / g).powf(y) - one;
        if self.infinite_variation() {
            pos += z * y / m;
            neg -= z * y / g;
        }
        (pos * m.powf(y) + neg * g.powf(y)) * (c * self.gamma_neg_y())
    }

    /// Closed-form characteristic exponent without drift, evaluated at real `u`.
    pub fn closed_char_exponent(&self, u: f64) -> Complex64 {
        self.closed_cgf_complex(Complex64::new(0.0, u))
    }

    /// `n`-th cumulant of `L_1` for `n ≥ 2`: `C Γ(n-Y) (M^{Y-n} + (-1)^n G^{Y-n})`.
    pub fn cumulant_of_order(&self, n: u32) -> f64 {
        assert!(n >= 2, "drift-free cumulants start at order 2");
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let nf = n as f64;
        self.c
            * gamma(nf - self.y)
            * (self.m.powf(self.y - nf) + sign * self.g.powf(self.y - nf))
    }

    // ------------------------------------------------------------------
    // Quadrature reference for truncated integrals
    // ------------------------------------------------------------------

    /// `∫_0^eps h(x) C x^{-1-Y} dx` on one half-line, where `h_over_x2`
    /// returns `h(x)/x²` (tempering included). Uses `x = eps·t^{1/(2-Y)}`
    /// which absorbs the `x^{1-Y}` endpoint behaviour.
    fn small_integral<F: Fn(f64) -> f64>(&self, eps: f64, h_over_x2: F) -> f64 {
        let k = 2.0 - self.y;
        let p = 1.0 / k;
        let scale = self.c * eps.powf(k) / k;
        scale * integrate(|t| h_over_x2(eps * t.powf(p)), 0.0, 1.0, QuadTol::default())
    }

    /// `∫_lo^hi h(x) C x^{-1-Y} dx` with `0 < lo`, `hi = None` meaning ∞.
    fn outer_integral<F: Fn(f64) -> f64>(&self, lo: f64, hi: Option<f64>, h: F) -> f64 {
        let y = self.y;
        let c = self.c;
        let density = |x: f64| c * h(x) * x.powf(-1.0 - y);
        let split = hi.map_or(1.0, |h| h.min(1.0));
        let mut total = 0.0;
        if lo < split {
            // x = e^s on [lo, split]
            total += integrate(
                |s| {
                    let x = s.exp();
                    density(x) * x
                },
                lo.ln(),
                split.ln(),
                QuadTol::default(),
            );
        }
        let start = lo.max(split);
        match hi {
            None => total += integrate_to_infinity(density, start, QuadTol::default()),
            Some(h) if h > start => total += integrate(density, start, h, QuadTol::default()),
            _ => {}
        }
        total
    }

    /// `σ²(ε) = ∫_{|x|≤ε} x² ν(dx)`.
    pub fn sigma_sq(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let (g, m) = (self.g, self.m);
        Ok(self.small_integral(eps, |x| (-m * x).exp() + (-g * x).exp()))
    }

    /// `∫_{|x|<ε} x^n ν(dx)` for `n ≥ 2`.
    pub fn small_moment(&self, eps: f64, n: i32) -> Result<f64> {
        check_eps(eps)?;
        if n < 2 {
            return domain(format!("small-jump moments start at order 2, got {n}"));
        }
        let (g, m) = (self.g, self.m);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(self.small_integral(eps, |x| x.powi(n - 2) * ((-m * x).exp() + sign * (-g * x).exp())))
    }

    /// Small-jump cumulant correction `∫_{|x|<ε}(e^{θx}-1-θx) ν(dx) ≥ 0`.
    pub fn small_jump_correction(&self, eps: f64, theta: f64) -> Result<f64> {
        check_eps(eps)?;
        self.check_theta_one(theta)?;
        let (g, m) = (self.g, self.m);
        Ok(self.small_integral(eps, |x| {
            let x2 = x * x;
            (exp_rem2(theta * x) * (-m * x).exp() + exp_rem2(-theta * x) * (-g * x).exp()) / x2
        }))
    }

    /// Derivative in `θ` of [`small_jump_correction`](Self::small_jump_correction):
    /// `∫_{|x|<ε} x(e^{θx}-1) ν(dx)`.
    pub fn small_jump_correction_grad(&self, eps: f64, theta: f64) -> Result<f64> {
        check_eps(eps)?;
        self.check_theta_one(theta)?;
        let (g, m) = (self.g, self.m);
        Ok(self.small_integral(eps, |x| {
            ((theta * x).exp_m1() * (-m * x).exp() - (-theta * x).exp_m1() * (-g * x).exp()) / x
        }))
    }

    /// `∫_{x ≥ lo} x^k ν_±(dx)` on one side, optionally restricted to `x < hi`,
    /// for the measure tilted by `theta` (`0` for the original measure).
    pub fn side_moment_quad(&self, side: Side, k: i32, lo: f64, hi: Option<f64>, theta: f64) -> f64 {
        let rate = match side {
            Side::Positive => self.m - theta,
            Side::Negative => self.g + theta,
        };
        self.outer_integral(lo, hi, |x| x.powi(k) * (-rate * x).exp())
    }

    /// Lévy–Khintchine integral `∫(e^{θx} - 1 - θx 1_{|x|≤1}) ν(dx)` by quadrature.
    pub fn levy_khintchine_quad(&self, theta: f64) -> Result<f64> {
        self.check_theta_one(theta)?;
        let (g, m) = (self.g, self.m);
        let inner = self.small_integral(1.0, |x| {
            (exp_rem2(theta * x) * (-m * x).exp() + exp_rem2(-theta * x) * (-g * x).exp()) / (x * x)
        });
        let pos = self.outer_integral(1.0, None, |x| ((theta - m) * x).exp() - (-m * x).exp());
        let neg = self.outer_integral(1.0, None, |x| ((-theta - g) * x).exp() - (-g * x).exp());
        Ok(inner + pos + neg)
    }

    /// `∫_{|x|>1} x ν(dx)` by quadrature.
    pub fn big_jump_mean_quad(&self) -> f64 {
        self.side_moment_quad(Side::Positive, 1, 1.0, None, 0.0)
            - self.side_moment_quad(Side::Negative, 1, 1.0, None, 0.0)
    }

    /// `∫_{|x|≤1} x ν(dx)` by quadrature (finite only for `Y < 1`).
    pub fn small_jump_mean_quad(&self) -> Result<f64> {
        if self.infinite_variation() {
            return domain("∫_{|x|≤1} x ν(dx) diverges for Y > 1");
        }
        let (g, m) = (self.g, self.m);
        // x = t^{1/(1-Y)} absorbs x^{-Y}
        let k = 1.0 - self.y;
        let p = 1.0 / k;
        let v = integrate(
            |t| {
                let x = t.powf(p);
                (-m * x).exp() - (-g * x).exp()
            },
            0.0,
            1.0,
            QuadTol::default(),
        );
        Ok(self.c * v / k)
    }

    // ------------------------------------------------------------------
    // Incomplete-gamma fast path
    // ------------------------------------------------------------------

    /// `∫_ε^∞ x^k C e^{-rate·x} x^{-1-Y} dx = C rate^{Y-k} Γ(k-Y, rate·ε)`.
    pub fn tail_moment(&self, k: i32, rate: f64, eps: f64) -> f64 {
        let s = k as f64 - self.y;
        self.c * rate.powf(-s) * upper_gamma(s, rate * eps)
    }

    /// Expected number of untempered proposals with `x ≥ eps` on one side
    /// per unit time: `C ε^{-Y} / Y`.
    pub fn proposal_intensity(&self, eps: f64) -> f64 {
        self.c * eps.powf(-self.y) / self.y
    }

    /// Proposal intensity on the band `[lo, hi)`.
    pub fn band_proposal_intensity(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.c * (lo.powf(-self.y) - hi.powf(-self.y)) / self.y
    }
}

/// Upper incomplete gamma `Γ(s, z)` for `z > 0` and non-integer `s > -2`,
/// by downward recurrence from a positive first argument.
pub fn upper_gamma(s: f64, z: f64) -> f64 {
    if s > 0.0 {
        gamma(s) * gamma_ur(s, z)
    } else {
        (upper_gamma(s + 1.0, z) - z.powf(s) * (-z).exp()) / s
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        domain(format!("cut-off must lie in (0, 1], got {eps}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn calibrated_1d() -> CgmyParams {
        CgmyParams::new(0.0244, 0.0765, 7.5515, 1.2945).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(CgmyParams::new(0.0, 1.0, 1.0, 0.5).is_err());
        assert!(CgmyParams::new(1.0, -1.0, 1.0, 0.5).is_err());
        assert!(CgmyParams::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(CgmyParams::new(1.0, 1.0, 1.0, 2.0).is_err());
        assert!(CgmyParams::new(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn density_by_substitution() {
        let p = CgmyParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(p.levy_density(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        let p = CgmyParams::new(1.0, 2.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(p.levy_density(-1.0).unwrap(), (-2.0f64).exp(), max_relative = 1e-15);
        assert!(p.levy_density(0.0).is_err());
        // 0.0244 e^{-3.77575} / 0.5^{2.2945}
        let v = calibrated_1d().levy_density(0.5).unwrap();
        assert_relative_eq!(v, 0.0244 * (-3.77575f64).exp() * 0.5f64.powf(-2.2945), max_relative = 1e-14);
    }

    #[test]
    fn gamma_neg_y_matches_recurrence() {
        // Γ(-0.5) = -2 √π
        let p = CgmyParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(p.gamma_neg_y(), -2.0 * std::f64::consts::PI.sqrt(), max_relative = 1e-13);
        // Γ(-1.5) = 4√π/3
        let p = CgmyParams::new(1.0, 1.0, 1.0, 1.5).unwrap();
        assert_relative_eq!(p.gamma_neg_y(), 4.0 * std::f64::consts::PI.sqrt() / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn tilt_identity_and_published_values() {
        let p = calibrated_1d();
        assert_eq!(p.esscher_tilt(0.0).unwrap(), p);
        let t = p.esscher_tilt(5.3).unwrap();
        assert_relative_eq!(t.g(), 5.3765, max_relative = 1e-15);
        assert_relative_eq!(t.m(), 2.2515, max_relative = 1e-13);
        assert_eq!(t.c(), p.c());
        assert_eq!(t.y(), p.y());
        assert!(p.esscher_tilt(7.5515).is_err());
        assert!(p.esscher_tilt(-0.0765).is_err());
    }

    #[test]
    fn theta_q_example() {
        let p = calibrated_1d();
        assert!(!p.theta_q_contains(2.0, 0.05));
        assert!(p.theta_q_contains(2.0, 0.03));
        assert!(p.theta_q_contains(50.0, 0.0));
    }

    #[test]
    fn closed_cgf_vanishes_at_origin() {
        for y in [0.4, 1.6] {
            let p = CgmyParams::new(0.7, 2.0, 3.0, y).unwrap();
            assert_eq!(p.closed_cgf(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn incomplete_gamma_matches_quadrature() {
        for y in [0.3, 0.9, 1.2945, 1.8] {
            let p = CgmyParams::new(0.5, 0.0765, 7.5515, y).unwrap();
            for &eps in &[1e-1, 1e-3] {
                for side in [Side::Positive, Side::Negative] {
                    let rate = p.rate(side);
                    for k in 0..3 {
                        let fast = p.tail_moment(k, rate, eps);
                        let quad = p.side_moment_quad(side, k, eps, None, 0.0);
                        assert_relative_eq!(fast, quad, max_relative = 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_sq_matches_closed_form() {
        // σ²(ε) = C[M^{Y-2} γ(2-Y, Mε) + G^{Y-2} γ(2-Y, Gε)]
        let p = calibrated_1d();
        let eps = 1e-3;
        let s = 2.0 - p.y();
        let lower = |rate: f64| rate.powf(-s) * (gamma(s) - upper_gamma(s, rate * eps));
        let expected = p.c() * (lower(p.m()) + lower(p.g()));
        assert_relative_eq!(p.sigma_sq(eps).unwrap(), expected, max_relative = 1e-9);
    }
}
