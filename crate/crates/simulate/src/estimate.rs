//! Empirical characteristic functions and their comparison with the Riccati solver.
//!
//! For `s > 0` the conditional expectation `E[e^{<u,X_T>} | X_s = x] = exp(φ + <ψ, x>)` is fitted
//! by nonlinear least squares on the cross-section `(X_s, e^{<u,X_T>})`; the standard error is the
//! delta-method (sandwich) error of the fitted value at `x`.

use std::ops::Add;

use ajk_measure::{Error, Result};
use ajk_models::ModelSpec;
use ajk_riccati::{char_fn, solve_backward_with, JsonComplex, RiccatiOptions};
use num_complex::Complex64;
use serde::Serialize;

use crate::ensemble::{simulate, PathEnsemble, SimOptions};
use crate::linalg::solve_complex;

type C = Complex64;

pub const MIN_PATHS: usize = 1000;
/// Largest accepted `|solver - MC| / SE`.
pub const Z_LIMIT: f64 = 4.0;

/// Pairwise summation in a fixed order, so reductions do not depend on scheduling.
pub fn pairwise_sum<T: Copy + Add<Output = T>>(xs: &[T], zero: T) -> T {
    match xs.len() {
        0 => zero,
        1 => xs[0],
        n if n <= 16 => xs[1..].iter().fold(xs[0], |a, b| a + *b),
        n => pairwise_sum(&xs[..n / 2], zero) + pairwise_sum(&xs[n / 2..], zero),
    }
}

fn zc() -> C {
    C::new(0.0, 0.0)
}

fn mean_and_se(y: &[C]) -> (C, f64) {
    if y.iter().all(|v| *v == y[0]) {
        return (y[0], 0.0);
    }
    let n = y.len() as f64;
    let mean = pairwise_sum(y, zc()) / n;
    let dev: Vec<f64> = y.iter().map(|v| (v - mean).norm_sqr()).collect();
    (mean, pairwise_sum(&dev, 0.0).sqrt() / n)
}

fn exp_dot(u: &[C], x: &[f64]) -> C {
    u.iter().zip(x).map(|(a, b)| a * *b).sum::<C>().exp()
}

/// Estimate of `E[e^{<u,X_T>} | X_s = x]` at `x` = the cross-sectional mean of `X_s`.
pub fn empirical_charfn(e: &PathEnsemble, s_index: usize, u: &[C]) -> Result<(C, f64)> {
    let mean = cross_mean(e, s_index);
    empirical_charfn_at(e, s_index, u, &mean)
}

fn cross_mean(e: &PathEnsemble, j: usize) -> Vec<f64> {
    (0..e.d)
        .map(|k| {
            let col: Vec<f64> = (0..e.n_paths).map(|p| e.state(p, j)[k]).collect();
            pairwise_sum(&col, 0.0) / e.n_paths as f64
        })
        .collect()
}

pub fn empirical_charfn_at(e: &PathEnsemble, s_index: usize, u: &[C], x: &[f64]) -> Result<(C, f64)> {
    if e.n_paths < MIN_PATHS {
        return Err(Error::InsufficientPaths { got: e.n_paths, need: MIN_PATHS });
    }
    if u.len() != e.d || x.len() != e.d || s_index >= e.grid.len() {
        return Err(Error::PreconditionViolated("dimension or grid index mismatch".into()));
    }
    let y: Vec<C> = (0..e.n_paths).map(|p| exp_dot(u, e.terminal(p))).collect();
    let centre = cross_mean(e, s_index);
    // regress only on coordinates that vary across paths
    let active: Vec<usize> = (0..e.d)
        .filter(|k| (0..e.n_paths).any(|p| e.state(p, s_index)[*k] != e.state(0, s_index)[*k]))
        .collect();
    if active.is_empty() {
        if x.iter().zip(&centre).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs())) {
            return Err(Error::PreconditionViolated("X_s is deterministic: cannot condition on another state".into()));
        }
        return Ok(mean_and_se(&y));
    }
    let z: Vec<Vec<f64>> = (0..e.n_paths)
        .map(|p| {
            let s = e.state(p, s_index);
            std::iter::once(1.0).chain(active.iter().map(|k| s[*k] - centre[*k])).collect()
        })
        .collect();
    let zx: Vec<f64> = std::iter::once(1.0).chain(active.iter().map(|k| x[*k] - centre[*k])).collect();
    fit_exponential(&y, &z, &zx)
}

fn fit_exponential(y: &[C], z: &[Vec<f64>], zx: &[f64]) -> Result<(C, f64)> {
    let q = zx.len();
    let (m0, _) = mean_and_se(y);
    let mut theta = vec![zc(); q];
    theta[0] = m0.ln();
    let model = |th: &[C], zp: &[f64]| th.iter().zip(zp).map(|(a, b)| a * *b).sum::<C>().exp();
    let rss = |th: &[C]| {
        let r: Vec<f64> = y.iter().zip(z).map(|(yp, zp)| (yp - model(th, zp)).norm_sqr()).collect();
        pairwise_sum(&r, 0.0)
    };
    let normal_eq = |th: &[C]| {
        let mut m = vec![vec![zc(); q]; q];
        let mut v = vec![zc(); q];
        for (yp, zp) in y.iter().zip(z) {
            let g = model(th, zp);
            let r = yp - g;
            for i in 0..q {
                let ji = (g * zp[i]).conj();
                v[i] += ji * r;
                for j in 0..q {
                    m[i][j] += ji * g * zp[j];
                }
            }
        }
        (m, v)
    };
    let mut current = rss(&theta);
    for _ in 0..100 {
        let (m, v) = normal_eq(&theta);
        let delta = solve_complex(m, v).ok_or_else(|| Error::PreconditionViolated("singular regression".into()))?;
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-6 {
            let trial: Vec<C> = theta.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let r = rss(&trial);
            if r <= current {
                theta = trial;
                current = r;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        let size = delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if !accepted || size < 1e-12 {
            break;
        }
    }
    let (m, _) = normal_eq(&theta);
    let gx = model(&theta, zx);
    // w_p = g(x) z(x)ᵀ M⁻¹ conj(J_p)
    let mt: Vec<Vec<C>> = (0..q).map(|i| (0..q).map(|j| m[j][i]).collect()).collect();
    let qv = solve_complex(mt, zx.iter().map(|v| C::new(*v, 0.0)).collect())
        .ok_or_else(|| Error::PreconditionViolated("singular regression".into()))?;
    let var: Vec<f64> = y
        .iter()
        .zip(z)
        .map(|(yp, zp)| {
            let g = model(&theta, zp);
            let w: C = gx * (0..q).map(|j| qv[j] * (g * zp[j]).conj()).sum::<C>();
            w.norm_sqr() * (yp - g).norm_sqr()
        })
        .collect();
    Ok((gx, pairwise_sum(&var, 0.0).sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct CharFnPoint {
    pub u: Vec<JsonComplex>,
    pub solver: JsonComplex,
    pub mc: JsonComplex,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub model: String,
    pub t: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub points: Vec<CharFnPoint>,
    pub max_z: f64,
    pub pass: bool,
}

/// `diff / se`, with differences at rounding level (relative to `scale`) counted as zero.
fn z_score(diff: f64, se: f64, scale: f64) -> f64 {
    if diff <= 1e-12 * (1.0 + scale) {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        f64::INFINITY
    }
}

/// Solver against Monte Carlo for `E e^{<u,X_T>}` from `x0` at time 0, over a grid of `u`.
pub fn compare_charfn(
    model: &ModelSpec,
    x0: &[f64],
    t_end: f64,
    us: &[Vec<C>],
    n_paths: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<CompareReport> {
    let ens = simulate(model, x0, t_end, n_paths, seed, opts)?;
    let mut points = Vec::with_capacity(us.len());
    for u in us {
        let sol = solve_backward_with(&model.params, t_end, u, 0.0, &RiccatiOptions::default())?;
        let exact = char_fn(&sol, 0.0, x0)?;
        let (mc, se) = empirical_charfn(&ens, 0, u)?;
        points.push(CharFnPoint {
            u: u.iter().map(|v| (*v).into()).collect(),
            solver: exact.into(),
            mc: mc.into(),
            se,
            z: z_score((exact - mc).norm(), se, exact.norm()),
        });
    }
    let max_z = points.iter().map(|p| p.z).fold(0.0, f64::max);
    Ok(CompareReport { model: model.name.clone(), t: t_end, n_paths, seed, points, max_z, pass: max_z <= Z_LIMIT })
}

#[derive(Debug, Clone, Serialize)]
pub struct MartingalePoint {
    pub t: f64,
    pub mean: JsonComplex,
    pub se: f64,
    pub z: f64,
}

/// Cross-sectional means of `exp(φ_t(T,u) + <ψ_t(T,u), X_t>)` at every grid time, scored
/// against the value at time 0 (`T` = last grid time).
pub fn martingale_check(model: &ModelSpec, e: &PathEnsemble, u: &[C]) -> Result<Vec<MartingalePoint>> {
    let t_end = *e.grid.last().unwrap();
    let opts = RiccatiOptions { stops: e.grid.clone(), ..Default::default() };
    let sol = solve_backward_with(&model.params, t_end, u, 0.0, &opts)?;
    let start = char_fn(&sol, 0.0, e.state(0, 0))?;
    let mut out = Vec::with_capacity(e.grid.len());
    for (j, t) in e.grid.iter().enumerate() {
        let (phi, psi) = sol.at(*t)?;
        let y: Vec<C> = (0..e.n_paths)
            .map(|p| (phi + psi.iter().zip(e.state(p, j)).map(|(a, b)| a * *b).sum::<C>()).exp())
            .collect();
        let (mean, se) = mean_and_se(&y);
        out.push(MartingalePoint { t: *t, mean: mean.into(), se, z: z_score((mean - start).norm(), se, start.norm()) });
    }
    Ok(out)
}
