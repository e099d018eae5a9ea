use crate::error::{LevyError, Result};
use crate::levy::MarketModel;

/// `γ_n = g0 / (n + n0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainSchedule {
    pub g0: f64,
    pub n0: f64,
}

impl Default for GainSchedule {
    fn default() -> Self {
        Self { g0: 1.0, n0: 100.0 }
    }
}

impl GainSchedule {
    pub fn new(g0: f64, n0: f64) -> Result<Self> {
        if !(g0 > 0.0 && g0.is_finite() && n0 >= 0.0 && n0.is_finite()) {
            return Err(LevyError::InvalidParams(format!("gain needs g0 > 0 and n0 ≥ 0 (got {g0}, {n0})")));
        }
        Ok(Self { g0, n0 })
    }

    /// Gain of step `n ≥ 1`.
    #[inline]
    pub fn gain(&self, n: u64) -> f64 {
        self.g0 / (n as f64 + self.n0)
    }
}

/// Compact box `K = Π_j [lower_j, upper_j]` containing the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ProjectionBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(LevyError::InvalidParams("box bounds must have equal nonzero length".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && *l <= 0.0 && 0.0 <= *u && l < u) {
                return Err(LevyError::InvalidParams(format!(
                    "box side [{l}, {u}] must be finite, nondegenerate and contain 0"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `Π_j [-G_j + δ, M_j - δ]`.
    pub fn theta_one(model: &MarketModel, margin: f64) -> Result<Self> {
        let (lo, hi) = model.components().iter().map(|p| (-p.g() + margin, p.m() - margin)).unzip();
        Self::new(lo, hi)
    }

    /// `Θ₁ ∩ Θ_q` shrunk by `δ`: `Π_j [max(-G_j, -M_j/q) + δ, min(M_j, G_j/q) - δ]`.
    pub fn theta_q(model: &MarketModel, q: f64, margin: f64) -> Result<Self> {
        if !(q > 1.0) {
            return Err(LevyError::InvalidParams(format!("q must exceed 1, got {q}")));
        }
        let (lo, hi) = model
            .components()
            .iter()
            .map(|p| ((-p.g()).max(-p.m() / q) + margin, p.m().min(p.g() / q) - margin))
            .unzip();
        Self::new(lo, hi)
    }

    /// Checks that the box lies strictly inside `Θ₁` of the model.
    pub fn check_inside(&self, model: &MarketModel) -> Result<()> {
        model.check_dim(&self.lower)?;
        if model.in_theta_one(&self.lower) && model.in_theta_one(&self.upper) {
            Ok(())
        } else {
            Err(LevyError::InvalidParams("projection box leaves (-G, M)".into()))
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Euclidean projection, i.e. component-wise clamping.
    pub fn project(&self, theta: &mut [f64]) {
        for ((t, l), u) in theta.iter_mut().zip(&self.lower).zip(&self.upper) {
            *t = t.clamp(*l, *u);
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.iter().zip(&self.lower).zip(&self.upper).all(|((t, l), u)| l <= t && t <= u)
    }

    /// True when some coordinate is within `tol` of a face.
    pub fn near_boundary(&self, theta: &[f64], tol: f64) -> bool {
        theta.iter().zip(&self.lower).zip(&self.upper).any(|((t, l), u)| t - l <= tol || u - t <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::CgmyParams;

    fn model() -> MarketModel {
        let p = CgmyParams::new(0.0244, 0.0765, 7.5515, 1.2945).unwrap();
        MarketModel::calibrated(vec![p], 1.1f64.ln(), vec![100.0], 1.0).unwrap()
    }

    #[test]
    fn boxes() {
        let m = model();
        let b = ProjectionBox::theta_one(&m, 1e-2).unwrap();
        assert!(b.contains(&[5.3]));
        b.check_inside(&m).unwrap();
        let q = ProjectionBox::theta_q(&m, 3.0, 1e-2).unwrap();
        assert!(!q.contains(&[5.3]));
        assert!((q.upper()[0] - (0.0765 / 3.0 - 1e-2)).abs() < 1e-15);
        let mut t = [9.0];
        b.project(&mut t);
        assert_eq!(t, [7.5415]);
        assert!(ProjectionBox::new(vec![0.5], vec![1.0]).is_err());
    }

    #[test]
    fn gain_is_harmonic() {
        let g = GainSchedule::default();
        assert_eq!(g.gain(1), 1.0 / 101.0);
    }
}
