use rayon::prelude::*;

use super::rm::{dot, VarianceObjective};
use crate::error::{domain, Result};
use crate::estimators::chunks;
use crate::sampler::RngStream;
use crate::stats::Welford;

/// Untilted draws of `L^ε_T` shared across tilts (common random numbers).
/// Only draws with `F_i(x) ≠ 0` are stored; the rest contribute zeros.
#[derive(Clone, Debug)]
pub struct SharedDraws {
    dim: usize,
    total: u64,
    xs: Vec<f64>,
    fi: Vec<f64>,
}

impl SharedDraws {
    pub fn draw(obj: &VarianceObjective, n: u64, rng: &RngStream) -> Self {
        let d = obj.dim();
        let parts: Vec<(Vec<f64>, Vec<f64>)> = chunks(n)
            .into_par_iter()
            .map(|(c, len)| {
                let mut r = rng.substream(c);
                let (mut x, mut scratch) = (vec![0.0; d], vec![0.0; d]);
                let (mut xs, mut fi) = (Vec::new(), Vec::new());
                for _ in 0..len {
                    obj.sampler().fill(None, &mut x, &mut r);
                    let f = obj.fi(&x, &mut scratch);
                    if f != 0.0 {
                        xs.extend_from_slice(&x);
                        fi.push(f);
                    }
                }
                (xs, fi)
            })
            .collect();
        let mut xs = Vec::new();
        let mut fi = Vec::new();
        for (a, b) in parts {
            xs.extend(a);
            fi.extend(b);
        }
        Self { dim: d, total: n, xs, fi }
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn finish(&self, mut w: Welford) -> Welford {
        w.merge(&Welford::constant(self.total - w.count(), 0.0));
        w
    }

    /// `v̂_i(θ)` and its standard error.
    pub fn surface_at(&self, obj: &VarianceObjective, theta: &[f64]) -> Result<(f64, f64)> {
        let lz = obj.log_normalizer(theta)?;
        let mut w = Welford::new();
        for (x, f) in self.xs.chunks_exact(self.dim).zip(&self.fi) {
            w.push(f * (lz - dot(theta, x)).exp());
        }
        let w = self.finish(w);
        Ok((w.mean(), w.stderr()))
    }

    /// `Σ_k c_k v̂_i(θ_k)` and its standard error, computed per draw so that
    /// the common random numbers cancel in the error.
    pub fn combination_at(&self, obj: &VarianceObjective, terms: &[(Vec<f64>, f64)]) -> Result<(f64, f64)> {
        let lz = terms
            .iter()
            .map(|(theta, _)| obj.log_normalizer(theta))
            .collect::<Result<Vec<_>>>()?;
        let mut w = Welford::new();
        for (x, f) in self.xs.chunks_exact(self.dim).zip(&self.fi) {
            let v: f64 = terms.iter().zip(&lz).map(|((theta, c), l)| c * (l - dot(theta, x)).exp()).sum();
            w.push(f * v);
        }
        let w = self.finish(w);
        Ok((w.mean(), w.stderr()))
    }

    /// Sample mean and standard error of `H_i(θ, ·)` per coordinate.
    pub fn h_mean_at(&self, obj: &VarianceObjective, theta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let lz = obj.log_normalizer(theta)?;
        let mut grad = vec![0.0; self.dim];
        obj.grad_log_normalizer(theta, &mut grad)?;
        let mut ws = vec![Welford::new(); self.dim];
        for (x, f) in self.xs.chunks_exact(self.dim).zip(&self.fi) {
            let factor = f * (lz - dot(theta, x)).exp();
            for j in 0..self.dim {
                ws[j].push((grad[j] - x[j]) * factor);
            }
        }
        let ws: Vec<Welford> = ws.into_iter().map(|w| self.finish(w)).collect();
        Ok((ws.iter().map(|w| w.mean()).collect(), ws.iter().map(|w| w.stderr()).collect()))
    }
}

/// One grid point of a variance scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint {
    pub theta: Vec<f64>,
    pub value: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of `v_{i,ε}` on a grid from one shared sample set.
pub fn variance_surface(
    obj: &VarianceObjective,
    grid: &[Vec<f64>],
    n_mc: u64,
    rng: &RngStream,
) -> Result<Vec<SurfacePoint>> {
    for theta in grid {
        if !obj.sampler().model().in_theta_one(theta) {
            return domain(format!("grid point {theta:?} outside Θ₁"));
        }
    }
    let draws = SharedDraws::draw(obj, n_mc, rng);
    grid.par_iter()
        .map(|theta| {
            let (value, stderr) = draws.surface_at(obj, theta)?;
            Ok(SurfacePoint { theta: theta.clone(), value, stderr })
        })
        .collect()
}

/// Grid point with the smallest estimate.
pub fn argmin(points: &[SurfacePoint]) -> Option<&SurfacePoint> {
    points.iter().min_by(|a, b| a.value.total_cmp(&b.value))
}

/// Regular grid with `n` points on `[lo, hi]` per coordinate (tensor product).
pub fn tensor_grid(lo: &[f64], hi: &[f64], n: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| (0..n).map(|k| a + (b - a) * k as f64 / (n - 1).max(1) as f64).collect())
        .collect();
    let mut grid = vec![vec![]];
    for axis in &axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    grid
}
