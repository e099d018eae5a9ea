//! Model specification files.
//!
//! ```toml
//! [model]
//! r = 0.09531017980432493
//! s0 = 100.0          # or one spot per component: [100.0, 100.0]
//! T = 1.0
//!
//! [[model.component]]
//! C = 0.0244
//! G = 0.0765
//! M = 7.5515
//! Y = 1.2945
//! ```

use std::path::Path;

use serde::Deserialize;

use super::cgmy::CgmyParams;
use super::market::MarketModel;
use crate::error::{LevyError, Result};

#[derive(Debug, Deserialize)]
struct ModelFile {
    model: ModelSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    r: f64,
    s0: Spot,
    #[serde(rename = "T")]
    maturity: f64,
    component: Vec<ComponentSection>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Spot {
    Scalar(f64),
    PerComponent(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ComponentSection {
    C: f64,
    G: f64,
    M: f64,
    Y: f64,
}

/// Parses a model specification and calibrates it to the martingale condition.
pub fn parse_model(text: &str) -> Result<MarketModel> {
    let file: ModelFile = toml::from_str(text)?;
    let m = file.model;
    if m.component.is_empty() {
        return Err(LevyError::Config("model needs at least one [[model.component]]".into()));
    }
    let components = m
        .component
        .iter()
        .map(|c| CgmyParams::new(c.C, c.G, c.M, c.Y))
        .collect::<Result<Vec<_>>>()?;
    let s0 = match m.s0 {
        Spot::Scalar(s) => vec![s; components.len()],
        Spot::PerComponent(v) => v,
    };
    MarketModel::calibrated(components, m.r, s0, m.maturity)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MarketModel> {
    parse_model(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_spot_broadcasts() {
        let m = parse_model(
            "[model]\nr = 0.05\ns0 = 100.0\nT = 1.0\n\
             [[model.component]]\nC = 0.0244\nG = 0.0765\nM = 7.55015\nY = 0.9\n\
             [[model.component]]\nC = 0.0244\nG = 2.0\nM = 5.0\nY = 0.9\n",
        )
        .unwrap();
        assert_eq!(m.s0(), &[100.0, 100.0]);
        assert!(m.cumulant(&[1.0, 1.0]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_model("[model]\nr = 0.0\ns0 = 1.0\nT = 1.0\ncomponent = []\n").is_err());
        assert!(parse_model("[model]\nr = 0.0\ns0 = 1.0\nT = 1.0\n[[model.component]]\nC = 1\nG = 1\nM = 0.5\nY = 0.5\n").is_err());
        assert!(parse_model("[model]\nr = 0.0\ns0 = [1.0, 2.0]\nT = 1.0\n[[model.component]]\nC = 1\nG = 1\nM = 2\nY = 0.5\n").is_err());
    }
}
