//! Exact transition sampling for the catalog simulators.

use ajk_measure::{Error, Result};
use ajk_models::ExactSimulator;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Poisson, StandardNormal};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    if mean <= 0.0 {
        return Ok(0.0);
    }
    let p = Poisson::new(mean).map_err(|e| Error::InvalidRate(e.to_string()))?;
    Ok(p.sample(rng))
}

fn is_integer_step(t: f64, n_max: usize) -> Option<usize> {
    let n = t.round();
    (n == t && n >= 1.0 && n as usize <= n_max).then_some(n as usize)
}

pub fn state_dim(sim: &ExactSimulator, fallback: usize) -> usize {
    match sim {
        ExactSimulator::Vasicek { hjm_state: true, .. } => 3,
        ExactSimulator::Constant => fallback,
        _ => 1,
    }
}

/// Path on `grid` (flattened, `grid.len() × d`) started from `x0` at `grid[0]`.
pub fn sample_exact(sim: &ExactSimulator, x0: &[f64], grid: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = x0.len();
    if d != state_dim(sim, d) {
        return Err(Error::PreconditionViolated(format!("initial state has {d} components, simulator needs {}", state_dim(sim, d))));
    }
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(grid.len() * d);
    out.extend_from_slice(&x);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        match sim {
            ExactSimulator::Constant => {}
            ExactSimulator::Bernoulli { probs } => {
                if let Some(n) = is_integer_step(t1, probs.len()) {
                    if rng.random::<f64>() < probs[n - 1] {
                        x[0] += 1.0;
                    }
                }
            }
            ExactSimulator::Poisson { lambda, normal_jump_at } => {
                x[0] += poisson_count(lambda * h, rng)?;
                if *normal_jump_at == Some(t1) {
                    let eta = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    x[0] += eta + normal(rng) * x[0].max(0.0).sqrt();
                }
            }
            ExactSimulator::Vasicek { alpha, beta, sigma, gamma, jump_times, hjm_state } => {
                let (a, b, s) = (*alpha, *beta, *sigma);
                let e1 = (b * h).exp_m1() / b;
                let e2 = (2.0 * b * h).exp_m1() / (2.0 * b);
                let ri = d - 1;
                let r = x[ri];
                let z1 = normal(rng);
                if *hjm_state {
                    // (r_h, ∫_0^h r) jointly Gaussian
                    let var_r = s * s * e2;
                    let cov = s * s / b * (e2 - e1);
                    let var_i = s * s / (b * b) * (e2 - 2.0 * e1 + h);
                    let l11 = var_r.max(0.0).sqrt();
                    let l21 = if l11 > 0.0 { cov / l11 } else { 0.0 };
                    let l22 = (var_i - l21 * l21).max(0.0).sqrt();
                    let z2 = normal(rng);
                    x[0] += h;
                    x[1] += r * e1 + a * (e1 - h) / b + l21 * z1 + l22 * z2;
                    x[2] = r * (b * h).exp() + a * e1 + l11 * z1;
                } else {
                    x[0] = r * (b * h).exp() + a * e1 + s * e2.max(0.0).sqrt() * z1;
                }
                if jump_times.contains(&t1) {
                    x[ri] += gamma * normal(rng);
                    if *hjm_state {
                        x[0] += 1.0;
                    }
                }
            }
            ExactSimulator::Cir { kappa, sigma, a0 } => {
                let (k, s, a0) = (*kappa, *sigma, *a0);
                let decay = (-k * h).exp();
                let q = if k == 0.0 { h } else { -(-k * h).exp_m1() / k };
                if s == 0.0 {
                    x[0] = x[0] * decay + a0 * q;
                } else {
                    let c = 0.25 * s * s * q;
                    let df = 4.0 * a0 / (s * s);
                    let nc = x[0] * decay / c;
                    let dof = df + 2.0 * poisson_count(0.5 * nc, rng)?;
                    x[0] = if dof > 0.0 {
                        c * ChiSquared::new(dof).map_err(|e| Error::InvalidParameter(e.to_string()))?.sample(rng)
                    } else {
                        0.0
                    };
                }
            }
            ExactSimulator::Ar1Gaussian { alpha, sigma } => {
                if let Some(n) = is_integer_step(t1, alpha.len()) {
                    x[0] = alpha[n - 1] * x[0] + sigma * normal(rng);
                }
            }
        }
        out.extend_from_slice(&x);
    }
    Ok(out)
}
