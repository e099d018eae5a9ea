use std::ops::Deref;

use log::warn;

use super::cgmy::{check_eps, CgmyParams, Side};
use crate::error::{domain, LevyError, Result};

/// Esscher tilt parameter, one entry per model component.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltVector(Vec<f64>);

impl TiltVector {
    pub fn new(theta: Vec<f64>) -> Self {
        Self(theta)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for TiltVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for TiltVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Outcome of the Gaussian small-jump approximation check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianApprox {
    /// `σ(ε)/ε → ∞` as `ε → 0`.
    pub valid: bool,
    /// `σ(ε)/ε` grows like `ε^{-exponent}`.
    pub exponent: f64,
}

/// `σ(ε)/ε ~ const·ε^{-Y/2}`, which diverges for every admissible `Y`.
pub fn gaussian_approx_valid(p: &CgmyParams) -> GaussianApprox {
    let exponent = p.y() / 2.0;
    GaussianApprox { valid: exponent > 0.0, exponent }
}

/// Exponential Lévy market with independent CGMY coordinates.
///
/// Internally each coordinate stores the drift `b_j` that makes
/// `κ_j(θ) = b_j θ + closed_cgf_j(θ)`. The Lévy–Khintchine drift `γ_j`
/// (truncation function `x 1_{|x|≤1}`) is recovered from it on demand.
#[derive(Clone, Debug)]
pub struct MarketModel {
    components: Vec<CgmyParams>,
    drift: Vec<f64>,
    r: f64,
    s0: Vec<f64>,
    maturity: f64,
}

impl MarketModel {
    /// Builds a model from Lévy–Khintchine drifts `γ_j` without calibrating.
    pub fn with_gamma(
        components: Vec<CgmyParams>,
        gamma: Vec<f64>,
        r: f64,
        s0: Vec<f64>,
        maturity: f64,
    ) -> Result<Self> {
        check_shape(&components, gamma.len(), &s0, r, maturity)?;
        let drift = components
            .iter()
            .zip(&gamma)
            .map(|(p, g)| natural_drift_from_gamma(p, *g))
            .collect::<Result<Vec<_>>>()?;
        let model = Self { components, drift, r, s0, maturity };
        model.warn_on_mixed_y();
        Ok(model)
    }

    /// Sets each `γ_j = -∫(e^y - 1 - y 1_{|y|≤1}) ν_j(dy)` so that every
    /// discounted asset is a martingale, i.e. `κ_j(1) = 0`.
    pub fn calibrated(components: Vec<CgmyParams>, r: f64, s0: Vec<f64>, maturity: f64) -> Result<Self> {
        check_shape(&components, components.len(), &s0, r, maturity)?;
        let mut drift = Vec::with_capacity(components.len());
        for (j, p) in components.iter().enumerate() {
            if p.m() <= 1.0 {
                return Err(LevyError::Calibration(format!(
                    "component {j}: M = {} must exceed 1 for E[e^L] to be finite",
                    p.m()
                )));
            }
            drift.push(-p.closed_cgf(1.0)?);
        }
        let model = Self { components, drift, r, s0, maturity };
        model.warn_on_mixed_y();
        Ok(model)
    }

    fn warn_on_mixed_y(&self) {
        let y0 = self.components[0].y();
        if self.components.iter().any(|p| p.y() != y0) {
            warn!("components have different Y; the small-jump covariance limit is degenerate");
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
    pub fn components(&self) -> &[CgmyParams] {
        &self.components
    }
    pub fn component(&self, j: usize) -> &CgmyParams {
        &self.components[j]
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn s0(&self) -> &[f64] {
        &self.s0
    }
    pub fn maturity(&self) -> f64 {
        self.maturity
    }
    pub fn discount(&self) -> f64 {
        (-self.r * self.maturity).exp()
    }

    /// Drift `b_j` paired with the closed-form cumulant.
    pub fn natural_drift(&self, j: usize) -> f64 {
        self.drift[j]
    }

    /// Lévy–Khintchine drift `γ_j` (truncation `x 1_{|x|≤1}`), by quadrature.
    pub fn gamma(&self, j: usize) -> f64 {
        let p = &self.components[j];
        if p.infinite_variation() {
            self.drift[j] - p.big_jump_mean_quad()
        } else {
            self.drift[j] + p.small_jump_mean_quad().expect("finite variation")
        }
    }

    pub fn gammas(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.gamma(j)).collect()
    }

    pub fn check_dim(&self, theta: &[f64]) -> Result<()> {
        if theta.len() == self.dim() {
            Ok(())
        } else {
            Err(LevyError::InvalidParams(format!(
                "tilt has {} entries, model has {} components",
                theta.len(),
                self.dim()
            )))
        }
    }

    /// Component-wise `-G_j < θ_j < M_j`.
    pub fn in_theta_one(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && self.components.iter().zip(theta).all(|(p, t)| p.in_theta_one(*t))
    }

    /// `κ_j(θ)` for one coordinate.
    pub fn component_cumulant(&self, j: usize, theta: f64) -> Result<f64> {
        Ok(self.drift[j] * theta + self.components[j].closed_cgf(theta)?)
    }

    /// `κ_j'(θ)` for one coordinate.
    pub fn component_cumulant_grad(&self, j: usize, theta: f64) -> Result<f64> {
        Ok(self.drift[j] + self.components[j].closed_cgf_grad(theta)?)
    }

    /// `κ(θ) = Σ_j κ_j(θ_j)`.
    pub fn cumulant(&self, theta: &[f64]) -> Result<f64> {
        self.check_dim(theta)?;
        let mut k = 0.0;
        for (j, t) in theta.iter().enumerate() {
            k += self.component_cumulant(j, *t)?;
        }
        Ok(k)
    }

    pub fn grad_cumulant(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        theta.iter().enumerate().map(|(j, t)| self.component_cumulant_grad(j, *t)).collect()
    }

    /// Diagonal Hessian of `κ`.
    pub fn hess_cumulant_diag(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        self.components.iter().zip(theta).map(|(p, t)| p.closed_cgf_hess(*t)).collect()
    }

    /// `κ_ε(θ) = κ(θ) - Σ_j ∫_{|x|<ε}(e^{θx}-1-θx) ν_j(dx)`, correction by quadrature.
    pub fn truncated_cumulant(&self, eps: f64, theta: &[f64]) -> Result<f64> {
        check_eps(eps)?;
        let mut k = self.cumulant(theta)?;
        for (p, t) in self.components.iter().zip(theta) {
            k -= p.small_jump_correction(eps, *t)?;
        }
        Ok(k)
    }

    /// `∇κ_ε(θ)`, correction by quadrature.
    pub fn grad_truncated_cumulant(&self, eps: f64, theta: &[f64]) -> Result<Vec<f64>> {
        check_eps(eps)?;
        let mut g = self.grad_cumulant(theta)?;
        for ((p, t), gj) in self.components.iter().zip(theta).zip(g.iter_mut()) {
            *gj -= p.small_jump_correction_grad(eps, *t)?;
        }
        Ok(g)
    }

    /// `σ²(ε)` summed over components (trace of `Σ_ε`).
    pub fn sigma_sq(&self, eps: f64) -> Result<f64> {
        let mut s = 0.0;
        for p in &self.components {
            s += p.sigma_sq(eps)?;
        }
        Ok(s)
    }

    /// Diagonal of `Σ = lim σ^{-2}(ε) Σ_ε`. Only the components with the
    /// largest `Y` survive the limit; they share it in proportion to `C_j`.
    pub fn sigma_limit_diag(&self) -> Vec<f64> {
        let ymax = self.components.iter().map(|p| p.y()).fold(f64::MIN, f64::max);
        let total: f64 = self.components.iter().filter(|p| p.y() == ymax).map(|p| p.c()).sum();
        self.components
            .iter()
            .map(|p| if p.y() == ymax { p.c() / total } else { 0.0 })
            .collect()
    }

    /// `θ ∈ Θ_q`, i.e. `-M_j/q < θ_j < G_j/q` for every component.
    pub fn theta_q_contains(&self, q: f64, theta: &[f64]) -> Result<bool> {
        if !(q > 1.0) {
            return domain(format!("admissibility exponent q must exceed 1, got {q}"));
        }
        self.check_dim(theta)?;
        Ok(self.components.iter().zip(theta).all(|(p, t)| p.theta_q_contains(q, *t)))
    }

    /// The model under the Esscher measure `P_θ`: tilted components and the
    /// drift that makes `κ_θ(u) = κ(u + θ) - κ(θ)`.
    pub fn esscher_tilt(&self, theta: &[f64]) -> Result<Self> {
        self.check_dim(theta)?;
        let mut components = Vec::with_capacity(self.dim());
        let mut drift = Vec::with_capacity(self.dim());
        for (j, t) in theta.iter().enumerate() {
            let tilted = self.components[j].esscher_tilt(*t)?;
            drift.push(self.component_cumulant_grad(j, *t)? - tilted.closed_cgf_grad(0.0)?);
            components.push(tilted);
        }
        Ok(Self { components, drift, r: self.r, s0: self.s0.clone(), maturity: self.maturity })
    }

    /// Mean of `L_1` for one component: `κ_j'(0)`.
    pub fn component_mean(&self, j: usize) -> f64 {
        self.component_cumulant_grad(j, 0.0).expect("0 lies in Θ₁")
    }

    /// `∫_{|x|≥ε} x ν_j(dx)` by quadrature.
    pub fn outer_mean_quad(&self, j: usize, eps: f64) -> f64 {
        let p = &self.components[j];
        p.side_moment_quad(Side::Positive, 1, eps, None, 0.0) - p.side_moment_quad(Side::Negative, 1, eps, None, 0.0)
    }
}

fn natural_drift_from_gamma(p: &CgmyParams, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() {
        return Err(LevyError::InvalidParams("drift must be finite".into()));
    }
    Ok(if p.infinite_variation() {
        gamma + p.big_jump_mean_quad()
    } else {
        gamma - p.small_jump_mean_quad()?
    })
}

fn check_shape(components: &[CgmyParams], n_gamma: usize, s0: &[f64], r: f64, maturity: f64) -> Result<()> {
    let d = components.len();
    if d == 0 {
        return Err(LevyError::InvalidParams("model needs at least one component".into()));
    }
    if n_gamma != d || s0.len() != d {
        return Err(LevyError::InvalidParams(format!(
            "{d} components but {n_gamma} drifts and {} spots",
            s0.len()
        )));
    }
    if s0.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(LevyError::InvalidParams("spot prices must be positive".into()));
    }
    if !r.is_finite() || !(maturity > 0.0 && maturity.is_finite()) {
        return Err(LevyError::InvalidParams(format!("need finite r and T > 0 (r={r}, T={maturity})")));
    }
    Ok(())
}
