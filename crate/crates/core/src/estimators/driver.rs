use crate::error::Result;

/// Cumulant used in the Esscher weight `e^{-θ·L + Tκ(θ)}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightCumulant {
    /// `κ_ε`, which makes the weight exactly unbiased for `L^ε`.
    #[default]
    Truncated,
    /// `κ`, the cheaper approximation.
    Full,
}

/// Source of the tilt used for each successive sample of an importance
/// sampling estimator.
///
/// `theta` is read before sample `k` is drawn and `advance` is called after
/// it, so the tilt for sample `k` depends only on what the driver saw before.
pub trait TiltDriver: Send {
    fn theta(&self) -> &[f64];

    fn advance(&mut self) -> Result<()>;

    /// True when `theta` never changes, which lets estimators run in parallel.
    fn is_constant(&self) -> bool;

    /// Jump proposals the driver has drawn for itself.
    fn cost(&self) -> u64 {
        0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantTilt(pub Vec<f64>);

impl ConstantTilt {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }
}

impl TiltDriver for ConstantTilt {
    fn theta(&self) -> &[f64] {
        &self.0
    }
    fn advance(&mut self) -> Result<()> {
        Ok(())
    }
    fn is_constant(&self) -> bool {
        true
    }
}
