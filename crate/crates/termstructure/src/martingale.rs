//! Monte Carlo check that discounted bond prices have constant mean.

use ajk_measure::{Error, Result};
use ajk_simulate::{pairwise_sum, sample_path, time_grid, MIN_PATHS, Z_LIMIT};
use rayon::prelude::*;
use serde::Serialize;

use crate::loadings::Field;
use crate::model::{drift_residual, TermStructureModel};
use crate::pricing::{bond_deterministic, numeraire_deterministic, stochastic_part, PathView};

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleOptions {
    /// Simulation grid spacing.
    pub step: f64,
    /// Number of equally spaced check times in `(0, T]`.
    pub checks: usize,
}

impl Default for MartingaleOptions {
    fn default() -> Self {
        MartingaleOptions { step: 0.05, checks: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscountedPoint {
    pub t: f64,
    pub mean: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleReport {
    pub maturity: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// `P(0,T)`, the mean every point should match.
    pub target: f64,
    /// Largest drift-condition residual over the check times.
    pub max_drift_residual: f64,
    pub points: Vec<DiscountedPoint>,
    pub max_z: f64,
    /// Every point within `Z_LIMIT` standard errors of the target.
    pub flat: bool,
}

/// Drift residual below which a model counts as arbitrage-free for the report.
pub const DRIFT_TOL: f64 = 1e-8;

impl MartingaleReport {
    pub fn drift_ok(&self) -> bool {
        self.max_drift_residual < DRIFT_TOL
    }

    pub fn pass(&self) -> bool {
        self.flat && self.drift_ok()
    }
}

fn mean_and_se(y: &[f64]) -> (f64, f64) {
    if y.iter().all(|v| *v == y[0]) {
        return (y[0], 0.0);
    }
    let n = y.len() as f64;
    let mean = pairwise_sum(y, 0.0) / n;
    let dev: Vec<f64> = y.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, (pairwise_sum(&dev, 0.0) / (n - 1.0)).sqrt() / n.sqrt())
}

/// Simulates `X`, computes `P̃(t,T) = P(t,T) exp(-∫_{(0,t]} r dA)` at equally spaced check times
/// and compares its mean with `P(0,T)`.
///
/// The drift residual is reported rather than enforced, so a model that violates the drift
/// condition still gets a verdict from the data.
pub fn martingale_test(m: &TermStructureModel, t_end: f64, n_paths: usize, seed: u64, opts: &MartingaleOptions) -> Result<MartingaleReport> {
    if n_paths < MIN_PATHS {
        return Err(Error::InsufficientPaths { got: n_paths, need: MIN_PATHS });
    }
    let horizon = m.horizon();
    if !(t_end > 0.0 && t_end <= horizon) {
        return Err(Error::OutOfDomain { t: t_end, horizon });
    }
    if opts.checks == 0 || !(opts.step > 0.0) {
        return Err(Error::PreconditionViolated("need at least one check time and a positive step".into()));
    }
    let checks: Vec<f64> = (0..=opts.checks).map(|k| t_end * k as f64 / opts.checks as f64).collect();
    let atoms: Vec<f64> = m.driver().atoms().iter().map(|a| a.t).collect();
    let grid = time_grid(&atoms, t_end, opts.step, &checks);
    let idx: Vec<usize> = checks
        .iter()
        .map(|c| grid.iter().enumerate().min_by(|a, b| (a.1 - c).abs().total_cmp(&(b.1 - c).abs())).unwrap().0)
        .collect();

    let mut max_res: f64 = 0.0;
    let mut det = Vec::with_capacity(idx.len());
    for &j in &idx {
        let t = grid[j];
        max_res = max_res.max(drift_residual(m, t, t_end)?);
        // log P̃ = -(bond part) - (numéraire part)
        det.push(bond_deterministic(m, t, t_end)? + numeraire_deterministic(m, t)?);
    }
    let target = (-bond_deterministic(m, 0.0, t_end)?).exp();

    let l = &m.loadings;
    let per_path: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut exits = 0;
            let states = sample_path(&m.x_model, &m.x0, &grid, seed, p as u64, false, &mut exits)?;
            let path = PathView { grid: &grid, states: &states };
            Ok(idx
                .iter()
                .zip(&det)
                .map(|(&j, d)| {
                    // the ∫A(·,t)dX terms of the bond price and the numéraire cancel
                    (-d - stochastic_part(l, Field::Big(t_end), path, j)).exp()
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(idx.len());
    let mut column = vec![0.0; n_paths];
    for (c, &j) in idx.iter().enumerate() {
        for (p, row) in per_path.iter().enumerate() {
            column[p] = row[c];
        }
        let (mean, se) = mean_and_se(&column);
        let diff = (mean - target).abs();
        let z = if diff <= 1e-12 * (1.0 + target.abs()) {
            0.0
        } else if se > 0.0 {
            diff / se
        } else {
            f64::INFINITY
        };
        points.push(DiscountedPoint { t: grid[j], mean, se, z });
    }
    let max_z = points.iter().map(|p| p.z).fold(0.0, f64::max);
    Ok(MartingaleReport {
        maturity: t_end,
        n_paths,
        seed,
        target,
        max_drift_residual: max_res,
        points,
        max_z,
        flat: max_z <= Z_LIMIT,
    })
}
