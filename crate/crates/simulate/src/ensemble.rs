//! Path ensembles on a time grid containing every atom of the driver.

use std::io::Write;

use ajk_measure::{Error, Result};
use ajk_models::ModelSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::euler::sample_euler;
use crate::exact::sample_exact;

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Output grid; built from `step` and the atoms when absent.
    pub grid: Option<Vec<f64>>,
    pub step: f64,
    /// Use the Euler scheme when the model has no exact simulator.
    pub allow_euler: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { grid: None, step: 0.05, allow_euler: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub model: String,
    pub grid: Vec<f64>,
    pub d: usize,
    pub n_paths: usize,
    /// Path-major: `states[(p * grid.len() + j) * d + k]`.
    pub states: Vec<f64>,
    pub seed: u64,
    /// Euler truncations at the boundary of the state space, summed over paths.
    pub domain_exits: usize,
    pub exact: bool,
}

impl PathEnsemble {
    pub fn state(&self, path: usize, j: usize) -> &[f64] {
        let g = self.grid.len();
        &self.states[(path * g + j) * self.d..(path * g + j + 1) * self.d]
    }

    pub fn terminal(&self, path: usize) -> &[f64] {
        self.state(path, self.grid.len() - 1)
    }

    /// Grid index of `t` (exact match).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.grid.iter().position(|s| *s == t)
    }

    /// Columns `t, path_id, x_1, …, x_d`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string(), "path_id".to_string()];
        header.extend((1..=self.d).map(|k| format!("x_{k}")));
        wr.write_record(&header)?;
        for p in 0..self.n_paths {
            for (j, t) in self.grid.iter().enumerate() {
                let mut row = vec![t.to_string(), p.to_string()];
                row.extend(self.state(p, j).iter().map(|v| v.to_string()));
                wr.write_record(&row)?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// `0 = t_0 < … < t_n = T` with spacing at most `step`, every atom in `(0, T]` and `extra`
/// points; points within `1e-12` of an atom are merged into it.
pub fn time_grid(atoms: &[f64], t_end: f64, step: f64, extra: &[f64]) -> Vec<f64> {
    let n = (t_end / step).ceil().max(1.0) as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| (k as f64 * t_end / n as f64).min(t_end)).collect();
    pts.extend(extra.iter().copied().filter(|t| *t >= 0.0 && *t <= t_end));
    let atoms: Vec<f64> = atoms.iter().copied().filter(|t| *t > 0.0 && *t <= t_end).collect();
    pts.retain(|t| !atoms.iter().any(|a| (a - t).abs() < 1e-12));
    pts.extend(atoms);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

/// Generator for path `index`: ChaCha8 keyed by `seed`, stream `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_start(model: &ModelSpec, x0: &[f64]) -> Result<()> {
    let shape = &model.params.shape;
    if x0.len() != shape.d() {
        return Err(Error::PreconditionViolated(format!("x0 has {} components, model has {}", x0.len(), shape.d())));
    }
    if !shape.contains_state(x0) {
        return Err(Error::DomainExit { t: 0.0, detail: format!("x0 = {x0:?} outside the state space") });
    }
    Ok(())
}

/// One path of `model` on `grid`; `exits` counts Euler truncations.
pub fn sample_path(model: &ModelSpec, x0: &[f64], grid: &[f64], seed: u64, index: u64, allow_euler: bool, exits: &mut usize) -> Result<Vec<f64>> {
    let mut rng = path_rng(seed, index);
    match &model.simulator {
        Some(sim) => sample_exact(sim, x0, grid, &mut rng),
        None if allow_euler => sample_euler(&model.params, x0, grid, &mut rng, exits),
        None => Err(Error::PreconditionViolated(format!("model '{}' has no exact simulator", model.name))),
    }
}

pub fn simulate(model: &ModelSpec, x0: &[f64], t_end: f64, n_paths: usize, seed: u64, opts: &SimOptions) -> Result<PathEnsemble> {
    check_start(model, x0)?;
    let horizon = model.horizon();
    if !(t_end > 0.0 && t_end <= horizon) {
        return Err(Error::OutOfDomain { t: t_end, horizon });
    }
    let atoms: Vec<f64> = model.params.driver.atoms().iter().map(|a| a.t).collect();
    let grid = match &opts.grid {
        Some(g) => {
            if g.first() != Some(&0.0) || g.last() != Some(&t_end) || g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidTimes("grid must increase strictly from 0 to T".into()));
            }
            if atoms.iter().any(|a| *a <= t_end && !g.contains(a)) {
                return Err(Error::InvalidTimes("grid must contain every atom of the driver".into()));
            }
            g.clone()
        }
        None => time_grid(&atoms, t_end, opts.step, &[]),
    };
    let results: Vec<Result<(Vec<f64>, usize)>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut exits = 0;
            sample_path(model, x0, &grid, seed, p as u64, opts.allow_euler, &mut exits).map(|v| (v, exits))
        })
        .collect();
    let mut states = Vec::with_capacity(n_paths * grid.len() * x0.len());
    let mut domain_exits = 0;
    for r in results {
        let (v, e) = r?;
        states.extend(v);
        domain_exits += e;
    }
    Ok(PathEnsemble {
        model: model.name.clone(),
        grid,
        d: x0.len(),
        n_paths,
        states,
        seed,
        domain_exits,
        exact: model.simulator.is_some(),
    })
}
