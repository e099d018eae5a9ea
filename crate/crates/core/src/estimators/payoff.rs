use std::fmt;
use std::sync::Arc;

use crate::levy::MarketModel;

/// Kind tag carried by every payoff.
#[derive(Clone, Debug, PartialEq)]
pub enum PayoffKind {
    CallOnSum { strike: f64 },
    Custom(String),
}

/// Undiscounted payoff as a function of the terminal log-returns `x = L_T`.
pub trait Payoff: Send + Sync {
    fn evaluate(&self, x: &[f64]) -> f64;

    /// Almost-everywhere gradient in `x`, written into `out`.
    fn gradient(&self, x: &[f64], out: &mut [f64]);

    fn kind(&self) -> PayoffKind;

    /// `F₁ = F²`.
    fn f1(&self, x: &[f64]) -> f64 {
        let f = self.evaluate(x);
        f * f
    }

    /// `F₂ = ∇F · Σ ∇F` for a diagonal `Σ`.
    fn f2(&self, x: &[f64], sigma_diag: &[f64], scratch: &mut [f64]) -> f64 {
        self.gradient(x, scratch);
        scratch.iter().zip(sigma_diag).map(|(g, s)| g * g * s).sum()
    }
}

/// `(Σ_j S0_j e^{rT + x_j} - K)_+`.
#[derive(Clone, Debug, PartialEq)]
pub struct CallOnSum {
    strike: f64,
    forward: Vec<f64>,
}

impl CallOnSum {
    pub fn new(strike: f64, model: &MarketModel) -> Self {
        let growth = (model.r() * model.maturity()).exp();
        Self { strike, forward: model.s0().iter().map(|s| s * growth).collect() }
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    #[inline]
    fn basket(&self, x: &[f64]) -> f64 {
        self.forward.iter().zip(x).map(|(f, xj)| f * xj.exp()).sum()
    }
}

impl Payoff for CallOnSum {
    #[inline]
    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.basket(x) - self.strike).max(0.0)
    }

    /// Zero on and below the kink.
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let itm = self.basket(x) > self.strike;
        for ((o, f), xj) in out.iter_mut().zip(&self.forward).zip(x) {
            *o = if itm { f * xj.exp() } else { 0.0 };
        }
    }

    fn kind(&self) -> PayoffKind {
        PayoffKind::CallOnSum { strike: self.strike }
    }
}

/// The log-return of one coordinate, `F(x) = x_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReturn {
    pub component: usize,
}

impl Payoff for LogReturn {
    fn evaluate(&self, x: &[f64]) -> f64 {
        x[self.component]
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[self.component] = 1.0;
    }
    fn kind(&self) -> PayoffKind {
        PayoffKind::Custom(format!("log-return[{}]", self.component))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant(pub f64);

impl Payoff for Constant {
    fn evaluate(&self, _x: &[f64]) -> f64 {
        self.0
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn kind(&self) -> PayoffKind {
        PayoffKind::Custom(format!("constant {}", self.0))
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Payoff from closures.
#[derive(Clone)]
pub struct CustomPayoff {
    name: String,
    value: Arc<ValueFn>,
    grad: Arc<GradFn>,
}

impl CustomPayoff {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), value: Arc::new(value), grad: Arc::new(grad) }
    }
}

impl fmt::Debug for CustomPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPayoff").field("name", &self.name).finish()
    }
}

impl Payoff for CustomPayoff {
    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        (self.grad)(x, out)
    }
    fn kind(&self) -> PayoffKind {
        PayoffKind::Custom(self.name.clone())
    }
}
