use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{LevyError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Mc,
    Sr,
    Ismc,
    Issr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mc, Method::Sr, Method::Ismc, Method::Issr];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "MC",
            Method::Sr => "SR",
            Method::Ismc => "ISMC",
            Method::Issr => "ISSR",
        }
    }

    pub fn is_romberg(&self) -> bool {
        matches!(self, Method::Sr | Method::Issr)
    }

    pub fn is_tilted(&self) -> bool {
        matches!(self, Method::Ismc | Method::Issr)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = LevyError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MC" => Ok(Method::Mc),
            "SR" => Ok(Method::Sr),
            "ISMC" => Ok(Method::Ismc),
            "ISSR" => Ok(Method::Issr),
            _ => Err(LevyError::Config(format!("unknown method {s:?}"))),
        }
    }
}

/// Undiscounted summary of one level of an estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSummary {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    /// Jump proposals drawn for this level.
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub method: Method,
    pub eps: f64,
    pub beta: f64,
    pub n: u64,
    pub n1: u64,
    pub n2: u64,
    /// Discounted price estimate.
    pub estimate: f64,
    pub stderr: f64,
    /// Jump proposals drawn for the estimate, tilt drivers included.
    pub cost: u64,
    /// Part of `cost` spent by adaptive tilt drivers.
    pub driver_cost: u64,
    pub wall_time_s: f64,
    pub seed: u64,
    pub levels: Vec<LevelSummary>,
}

/// One CSV row of a report.
#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub method: String,
    pub eps: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N2")]
    pub n2: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub cost: u64,
    pub wall_time_s: f64,
    pub seed: u64,
}

impl EstimatorReport {
    pub fn row(&self) -> ReportRow {
        ReportRow {
            method: self.method.to_string(),
            eps: self.eps,
            beta: self.beta,
            n: self.n,
            n1: self.n1,
            n2: self.n2,
            estimate: self.estimate,
            stderr: self.stderr,
            cost: self.cost,
            wall_time_s: self.wall_time_s,
            seed: self.seed,
        }
    }

    /// Writes a header and this report as a single CSV row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.serialize(self.row())?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header() {
        let r = EstimatorReport {
            method: Method::Issr,
            eps: 1e-3,
            beta: 0.5,
            n: 10,
            n1: 10,
            n2: 3,
            estimate: 1.5,
            stderr: 0.1,
            cost: 99,
            driver_cost: 0,
            wall_time_s: 0.01,
            seed: 7,
            levels: vec![],
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("method,eps,beta,N,N1,N2,estimate,stderr,cost,wall_time_s,seed\nISSR,"));
        assert_eq!("issr".parse::<Method>().unwrap(), Method::Issr);
    }
}
