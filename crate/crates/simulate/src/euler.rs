//! Euler–Maruyama fallback with compound-Poisson jumps sampled from the finite jump components.
//!
//! Between atoms the step is `min(1e-3, gap/100)`; nonnegative coordinates are truncated at 0 and
//! every truncation is counted.

use ajk_lk::{AffineParameterSet, GammaSpec, JumpComponent, JumpMeasureSpec, StateSpaceShape};
use ajk_measure::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};

use crate::linalg::{cholesky_psd, lower_mul};

fn weights(x: &[f64]) -> impl Iterator<Item = (usize, f64)> + '_ {
    std::iter::once((0, 1.0)).chain(x.iter().enumerate().map(|(i, v)| (i + 1, *v)))
}

fn unsupported(what: &str) -> Error {
    Error::PreconditionViolated(format!("Euler scheme cannot sample {what}"))
}

fn sample_component(c: &JumpComponent, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    match c {
        JumpComponent::PointMass { x, .. } => Ok(x.clone()),
        JumpComponent::Exponential { rate, axis, .. } => {
            let mut v = vec![0.0; d];
            v[axis - 1] = Exp::new(*rate).map_err(|e| Error::InvalidRate(e.to_string()))?.sample(rng);
            Ok(v)
        }
        JumpComponent::Gaussian { mean, cov, restricted: false, .. } => {
            let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            Ok(lower_mul(&cholesky_psd(cov), &z).iter().zip(mean).map(|(a, m)| a + m).collect())
        }
        JumpComponent::Gaussian { restricted: true, .. } => Err(unsupported("restricted Gaussian jumps")),
        JumpComponent::Numeric { .. } => Err(unsupported("numeric jump densities")),
    }
}

/// Adds the jumps of the measure `Σ_i x̃_i μ_i · mass` (uncompensated) to `dx`; returns nothing.
fn add_jumps(
    mus: &[(f64, &JumpMeasureSpec)],
    t: f64,
    mass: f64,
    d: usize,
    dx: &mut [f64],
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut parts: Vec<(f64, &JumpComponent)> = Vec::new();
    for (w, mu) in mus {
        let sc = mu.scale.eval(t);
        for c in &mu.components {
            let rate = w * sc * c.weight() * mass;
            if rate > 0.0 {
                parts.push((rate, c));
            }
        }
    }
    let total: f64 = parts.iter().map(|p| p.0).sum();
    if total <= 0.0 {
        return Ok(());
    }
    let n = Poisson::new(total).map_err(|e| Error::InvalidRate(e.to_string()))?.sample(rng) as usize;
    for _ in 0..n {
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = parts[parts.len() - 1].1;
        for (r, c) in &parts {
            if pick < *r {
                chosen = c;
                break;
            }
            pick -= r;
        }
        for (a, b) in dx.iter_mut().zip(sample_component(chosen, d, rng)?) {
            *a += b;
        }
    }
    Ok(())
}

/// `(β - ∫h dμ)`, `α` and the jump measures of the combination `Σ_i x̃_i (β_i, α_i, μ_i)`.
fn combine<'a>(
    shape: &StateSpaceShape,
    x: &[f64],
    t: f64,
    triplet: impl Fn(usize) -> (Vec<f64>, Vec<Vec<f64>>, &'a JumpMeasureSpec),
) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<(f64, &'a JumpMeasureSpec)>)> {
    let d = shape.d();
    let mut b = vec![0.0; d];
    let mut a = vec![vec![0.0; d]; d];
    let mut mus = Vec::new();
    for (i, w) in weights(x) {
        if w == 0.0 {
            continue;
        }
        let (bi, ai, mi) = triplet(i);
        for k in 0..d {
            b[k] += w * bi[k];
            if !mi.is_empty() {
                b[k] -= w * mi.h_moments(shape, t, k)?.0;
            }
            for c in 0..d {
                a[k][c] += w * ai[k][c];
            }
        }
        if !mi.is_empty() {
            mus.push((w, mi));
        }
    }
    Ok((b, a, mus))
}

fn diffuse(b: &[f64], a: &[Vec<f64>], mass: f64, dx: &mut [f64], rng: &mut ChaCha8Rng) {
    let d = b.len();
    let scaled: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| v * mass).collect()).collect();
    let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let noise = lower_mul(&cholesky_psd(&scaled), &z);
    for k in 0..d {
        dx[k] += b[k] * mass + noise[k];
    }
}

fn truncate(shape: &StateSpaceShape, x: &mut [f64], exits: &mut usize) {
    for v in x.iter_mut().take(shape.m) {
        if *v < 0.0 {
            *v = 0.0;
            *exits += 1;
        }
    }
}

fn atom_jump(p: &AffineParameterSet, t: f64, x: &mut [f64], rng: &mut ChaCha8Rng) -> Result<()> {
    let d = p.d();
    match p.gamma_spec(t) {
        None => Ok(()),
        Some(GammaSpec::BlackBox(_)) => Err(unsupported("black-box jump transforms")),
        Some(GammaSpec::Table(tab)) => {
            let bm = tab.matrix(d);
            let mut pick = rng.random::<f64>();
            let mut xi = &tab.outcomes[tab.outcomes.len() - 1].x;
            for o in &tab.outcomes {
                if pick < o.p {
                    xi = &o.x;
                    break;
                }
                pick -= o.p;
            }
            let next: Vec<f64> = (0..d).map(|r| (0..d).map(|k| bm[r][k] * x[k]).sum::<f64>() + xi[r]).collect();
            x.copy_from_slice(&next);
            Ok(())
        }
        Some(GammaSpec::Enhanced(e)) => {
            let trip: Vec<_> = (0..=d).map(|i| e.triplet_full(i, d)).collect();
            let (b, a, mus) = combine(&p.shape, x, 0.0, |i| (trip[i].0.clone(), trip[i].1.clone(), &trip[i].2))?;
            let mut dx = vec![0.0; d];
            diffuse(&b, &a, 1.0, &mut dx, rng);
            add_jumps(&mus, 0.0, 1.0, d, &mut dx, rng)?;
            for (v, dv) in x.iter_mut().zip(dx) {
                *v += dv;
            }
            Ok(())
        }
    }
}

/// `min(1e-3, gap/100)` for the atom-free stretch containing `(t0, t1)`.
fn step_bound(p: &AffineParameterSet, t0: f64, t1: f64) -> f64 {
    let atoms = p.driver.atoms();
    let lo = atoms.iter().map(|a| a.t).filter(|t| *t <= t0).fold(0.0, f64::max);
    let hi = atoms.iter().map(|a| a.t).filter(|t| *t >= t1).fold(p.driver.horizon(), f64::min);
    (1e-3f64).min((hi - lo) / 100.0)
}

/// Euler path on `grid` (flattened `grid.len() × d`); `exits` counts truncations at 0.
pub fn sample_euler(
    p: &AffineParameterSet,
    x0: &[f64],
    grid: &[f64],
    rng: &mut ChaCha8Rng,
    exits: &mut usize,
) -> Result<Vec<f64>> {
    let d = p.d();
    let empty = JumpMeasureSpec::empty();
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(grid.len() * d);
    out.extend_from_slice(&x);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let n = ((t1 - t0) / step_bound(p, t0, t1)).ceil().max(1.0) as usize;
        let h = (t1 - t0) / n as f64;
        for k in 0..n {
            let t = t0 + k as f64 * h;
            let mass = p.driver.continuous_mass(t, t + h);
            if mass > 0.0 {
                let (b, a, mus) = combine(&p.shape, &x, t, |i| {
                    (p.beta_at(i, t), p.alpha_at(i, t), p.mu.get(i).unwrap_or(&empty))
                })?;
                let mut dx = vec![0.0; d];
                diffuse(&b, &a, mass, &mut dx, rng);
                add_jumps(&mus, t, mass, d, &mut dx, rng)?;
                for (v, dv) in x.iter_mut().zip(dx) {
                    *v += dv;
                }
                truncate(&p.shape, &mut x, exits);
            }
        }
        if p.driver.atom_at(t1).is_some() {
            atom_jump(p, t1, &mut x, rng)?;
            truncate(&p.shape, &mut x, exits);
        }
        out.extend_from_slice(&x);
    }
    Ok(out)
}
