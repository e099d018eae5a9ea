//! Fourier-cosine pricing of European options under one-dimensional
//! exponential CGMY.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::error::{LevyError, Result};
use crate::levy::MarketModel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosConfig {
    pub n_terms: usize,
    /// Half-width of the central part of the range, in units of `√c₂`.
    pub range_width: f64,
    /// Tail mass allowed outside the range, turned into widths through the
    /// exponential tempering rates.
    pub tail_tol: f64,
}

impl Default for CosConfig {
    fn default() -> Self {
        Self { n_terms: 1 << 14, range_width: 10.0, tail_tol: 1e-10 }
    }
}

impl CosConfig {
    pub fn with_terms(n_terms: usize) -> Self {
        Self { n_terms, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.n_terms < 16 {
            return Err(LevyError::Config(format!("COS needs at least 16 terms, got {}", self.n_terms)));
        }
        if !(self.range_width > 0.0 && self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(LevyError::Config(format!(
                "COS range needs range_width > 0 and tail_tol in (0, 1), got {} and {}",
                self.range_width, self.tail_tol
            )));
        }
        Ok(())
    }
}

fn one_d(m: &MarketModel) -> Result<()> {
    if m.dim() != 1 {
        return Err(LevyError::Domain(format!("COS pricing needs a one-dimensional model, got d = {}", m.dim())));
    }
    Ok(())
}

/// `E e^{iuL_T}` for real `u`.
pub fn char_fn(m: &MarketModel, u: f64) -> Complex64 {
    char_fn_complex(m, Complex64::new(u, 0.0))
}

/// Analytic continuation of [`char_fn`] to `-M < Im u < G`.
pub fn char_fn_complex(m: &MarketModel, u: Complex64) -> Complex64 {
    let z = Complex64::i() * u;
    ((z * m.natural_drift(0) + m.component(0).closed_cgf_complex(z)) * m.maturity()).exp()
}

/// Cumulants `c₁, c₂, c₄` of `L_T`.
pub fn cumulants(m: &MarketModel) -> Result<[f64; 3]> {
    one_d(m)?;
    let t = m.maturity();
    let p = m.component(0);
    Ok([t * m.component_cumulant_grad(0, 0.0)?, t * p.cumulant_of_order(2), t * p.cumulant_of_order(4)])
}

/// Truncation range `[a, b]` of `y = ln(S_T/K)`.
pub fn cos_range(m: &MarketModel, strike: f64, cfg: &CosConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let [c1, c2, _] = cumulants(m)?;
    let p = m.component(0);
    let centre = (m.s0()[0] / strike).ln() + m.r() * m.maturity() + c1;
    let core = cfg.range_width * c2.sqrt();
    let ln_tol = -cfg.tail_tol.ln();
    let left = core.max(ln_tol / p.g());
    let right = core.max(ln_tol / (p.m() - 1.0));
    Ok(((centre - left).min(-1.0), (centre + right).max(1.0)))
}

/// `χ_k(c, d) = ∫_c^d e^y cos(kπ(y-a)/(b-a)) dy`.
fn chi(w: f64, a: f64, c: f64, d: f64) -> f64 {
    let (cd, sd) = ((w * (d - a)).cos(), (w * (d - a)).sin());
    let (cc, sc) = ((w * (c - a)).cos(), (w * (c - a)).sin());
    let (ed, ec) = (d.exp(), c.exp());
    (cd * ed - cc * ec + w * (sd * ed - sc * ec)) / (1.0 + w * w)
}

/// `ψ_k(c, d) = ∫_c^d cos(kπ(y-a)/(b-a)) dy`.
fn psi(w: f64, a: f64, c: f64, d: f64) -> f64 {
    if w == 0.0 {
        d - c
    } else {
        ((w * (d - a)).sin() - (w * (c - a)).sin()) / w
    }
}

#[derive(Clone, Copy)]
enum Side {
    Put,
    Call,
}

fn cos_sum(m: &MarketModel, strike: f64, cfg: &CosConfig, side: Side) -> Result<f64> {
    one_d(m)?;
    if !(strike > 0.0) {
        return Err(LevyError::Domain(format!("strike must be positive, got {strike}")));
    }
    let (a, b) = cos_range(m, strike, cfg)?;
    let x0 = (m.s0()[0] / strike).ln() + m.r() * m.maturity();
    let width = b - a;
    let mut sum = 0.0;
    for k in 0..cfg.n_terms {
        let w = k as f64 * PI / width;
        let v = match side {
            Side::Put => -chi(w, a, a, 0.0) + psi(w, a, a, 0.0),
            Side::Call => chi(w, a, 0.0, b) - psi(w, a, 0.0, b),
        };
        let phase = Complex64::new(0.0, w * (x0 - a)).exp();
        let term = (char_fn(m, w) * phase).re * v;
        sum += if k == 0 { 0.5 * term } else { term };
    }
    Ok(m.discount() * 2.0 / width * strike * sum)
}

/// European put by cosine expansion.
pub fn cos_put(m: &MarketModel, strike: f64, cfg: &CosConfig) -> Result<f64> {
    cos_sum(m, strike, cfg, Side::Put)
}

/// European call from the call cosine coefficients directly.
pub fn cos_call_direct(m: &MarketModel, strike: f64, cfg: &CosConfig) -> Result<f64> {
    cos_sum(m, strike, cfg, Side::Call)
}

/// Price with the change observed when the number of terms is doubled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosPrice {
    pub price: f64,
    pub doubled: f64,
    pub a: f64,
    pub b: f64,
}

impl CosPrice {
    pub fn change_on_doubling(&self) -> f64 {
        (self.doubled - self.price).abs()
    }
}

/// European call from the put coefficients and put–call parity, together
/// with the doubling diagnostic.
pub fn cos_price_diagnostics(m: &MarketModel, strike: f64, cfg: &CosConfig) -> Result<CosPrice> {
    let parity = m.s0()[0] - m.discount() * strike;
    let price = cos_put(m, strike, cfg)? + parity;
    let doubled = cos_put(m, strike, &CosConfig { n_terms: 2 * cfg.n_terms, ..*cfg })? + parity;
    let (a, b) = cos_range(m, strike, cfg)?;
    let out = CosPrice { price, doubled, a, b };
    if out.change_on_doubling() > 1e-8 {
        warn!(
            "COS price not converged at {} terms: doubling moves it by {:.3e}",
            cfg.n_terms,
            out.change_on_doubling()
        );
    }
    Ok(out)
}

/// European call price `e^{-rT} E(S_T - K)_+`.
pub fn cos_price(m: &MarketModel, strike: f64, cfg: &CosConfig) -> Result<f64> {
    Ok(cos_price_diagnostics(m, strike, cfg)?.price)
}
