//! Discrete-time models embedded on a pure-atom driver with unit atoms at `1, 2, …, N`.

use std::sync::Arc;

use ajk_lk::{AffineParameterSet, GammaSpec, Outcome, StateSpaceShape, TableJump};
use ajk_measure::{DriverMeasure, Error, Result};
use num_complex::Complex64;

use crate::{ExactSimulator, ModelSpec};

type C = Complex64;

/// Log-characteristic function `u ↦ log E e^{uε}` of a noise variable.
pub type LogCf = Arc<dyn Fn(C) -> C + Send + Sync>;

fn unit_atoms(n: usize) -> Result<DriverMeasure> {
    if n == 0 {
        return Err(Error::InvalidTimes("schedule must have at least one step".into()));
    }
    let atoms: Vec<(f64, f64)> = (1..=n).map(|k| (k as f64, 1.0)).collect();
    DriverMeasure::pure_atoms(n as f64, &atoms)
}

/// Indices `n` with `s < n <= t`.
fn steps_in(s: f64, t: f64, n_max: usize) -> std::ops::RangeInclusive<usize> {
    let lo = (s.floor() as i64 + 1).max(1) as usize;
    let hi = (t.floor() as i64).min(n_max as i64).max(0) as usize;
    lo..=hi
}

/// Counting process with a unit jump at `n` with probability `p_n`.
pub fn discrete_poisson(p: &[f64]) -> Result<ModelSpec> {
    if let Some(bad) = p.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(Error::InvalidProbability(format!("p_n = {bad} not in (0, 1)")));
    }
    let mut params = AffineParameterSet::zero(StateSpaceShape::new(1, 0)?, unit_atoms(p.len())?);
    for (k, q) in p.iter().enumerate() {
        let table = TableJump {
            outcomes: vec![Outcome { p: *q, x: vec![1.0] }, Outcome { p: 1.0 - q, x: vec![0.0] }],
            linear: None,
        };
        params = params.with_gamma((k + 1) as f64, GammaSpec::Table(table));
    }
    let probs = p.to_vec();
    let n_max = p.len();
    let closed = move |s: f64, t: f64, u: &[C]| {
        let phi = steps_in(s, t, n_max).map(|n| (probs[n - 1] * u[0].exp() + (1.0 - probs[n - 1])).ln()).sum();
        Ok((phi, u.to_vec()))
    };
    Ok(ModelSpec {
        name: "discrete-poisson".into(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: Some(ExactSimulator::Bernoulli { probs: p.to_vec() }),
        notes: Vec::new(),
    })
}

/// `X_n = α(n) X_{n-1} + ε_n` with i.i.d. noise given by its log-characteristic function.
pub fn ar1_embed(alpha: &[f64], noise_logcf: LogCf) -> Result<ModelSpec> {
    let at_zero = noise_logcf(C::new(0.0, 0.0));
    if at_zero.norm() > 1e-14 || !at_zero.is_finite() {
        return Err(Error::InvalidNoise(format!("log E e^(0·ε) = {at_zero}, expected 0")));
    }
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter("autoregression coefficients must be finite".into()));
    }
    let mut params = AffineParameterSet::zero(StateSpaceShape::new(0, 1)?, unit_atoms(alpha.len())?);
    for (k, a) in alpha.iter().enumerate() {
        let (a, lcf) = (*a, noise_logcf.clone());
        params = params.with_gamma(
            (k + 1) as f64,
            GammaSpec::black_box(move |u: &[C]| Ok((lcf(u[0]), vec![(a - 1.0) * u[0]]))),
        );
    }
    let (coef, n_max) = (alpha.to_vec(), alpha.len());
    let closed = move |s: f64, t: f64, u: &[C]| {
        // walk backward from t: ψ ↦ α(n)ψ, φ += log E e^{ψ ε_n}
        let mut psi = u[0];
        let mut phi = C::new(0.0, 0.0);
        for n in steps_in(s, t, n_max).rev() {
            phi += noise_logcf(psi);
            psi *= coef[n - 1];
        }
        Ok((phi, vec![psi]))
    };
    Ok(ModelSpec {
        name: "ar1".into(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: None,
        notes: Vec::new(),
    })
}

/// AR(1) with `N(0, σ²)` noise.
pub fn ar1_gaussian(alpha: &[f64], sigma: f64) -> Result<ModelSpec> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidNoise(format!("noise standard deviation {sigma}")));
    }
    let s2 = sigma * sigma;
    let mut spec = ar1_embed(alpha, Arc::new(move |u: C| 0.5 * s2 * u * u))?;
    spec.simulator = Some(ExactSimulator::Ar1Gaussian { alpha: alpha.to_vec(), sigma });
    Ok(spec)
}

/// Exponents `(φ_n(m,u), ψ_n(m,u))` of a pure-atom driver with unit atoms at the integers, from
///
/// ```text
/// φ_k(k+1,u) = F(k,u) = γ_0(k+1,u),   ψ_k(k+1,u) = u + R(k,u) = u + γ̄(k+1,u)
/// φ_n(k+1,u) = F(k,u) + φ_n(k, u + R(k,u)),   ψ_n(k+1,u) = ψ_n(k, u + R(k,u))
/// ```
pub fn difference_recursion(p: &AffineParameterSet, n: usize, m: usize, u: &[C]) -> Result<(C, Vec<C>)> {
    if n > m {
        return Err(Error::InvalidTimes(format!("need n <= m, got {n} > {m}")));
    }
    if m == n {
        return Ok((C::new(0.0, 0.0), u.to_vec()));
    }
    let k = m - 1;
    let (f, r) = p.gamma_eval((k + 1) as f64, u)?;
    let next: Vec<C> = u.iter().zip(&r).map(|(a, b)| a + b).collect();
    let (phi, psi) = difference_recursion(p, n, k, &next)?;
    Ok((f + phi, psi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn discrete_poisson_single_step() {
        let m = discrete_poisson(&[0.3, 0.5]).unwrap();
        let i = c(0.0, 1.0);
        let (phi, psi) = m.closed_form(0.0, 1.0, &[i]).unwrap().unwrap();
        let expect = i + (0.3 + (-i).exp() * 0.7).ln();
        assert!((phi - expect).norm() < 1e-15);
        assert_eq!(psi, vec![i]);
        let (phi0, _) = m.closed_form(0.0, 2.0, &[c(0.0, 0.0)]).unwrap().unwrap();
        assert_eq!(phi0, c(0.0, 0.0));
    }

    #[test]
    fn discrete_poisson_constant_probability() {
        let p = 0.2;
        let m = discrete_poisson(&[p, p, p]).unwrap();
        let u = c(-0.1, 0.7);
        let (phi, _) = m.closed_form(0.0, 2.0, &[u]).unwrap().unwrap();
        let one = u + (p + (-u).exp() * (1.0 - p)).ln();
        assert!((phi - 2.0 * one).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(discrete_poisson(&[0.5, 1.0]), Err(Error::InvalidProbability(_))));
        assert!(matches!(ar1_embed(&[0.5], Arc::new(|u: C| u + 1.0)), Err(Error::InvalidNoise(_))));
    }

    #[test]
    fn ar1_gaussian_geometric_sums() {
        let (a, sigma) = (0.7, 0.4);
        let m = ar1_gaussian(&[a; 10], sigma).unwrap();
        let u = c(0.0, 1.3);
        for n in 1..=10 {
            let (phi, psi) = m.closed_form(0.0, n as f64, &[u]).unwrap().unwrap();
            let geo: f64 = (0..n).map(|k| a.powi(2 * k)).sum();
            assert!((phi - 0.5 * sigma * sigma * u * u * geo).norm() < 1e-13);
            assert!((psi[0] - a.powi(n) * u).norm() < 1e-15);
        }
    }

    #[test]
    fn ar1_degenerate_cases() {
        let id = ar1_embed(&[1.0; 3], Arc::new(|_u: C| C::new(0.0, 0.0))).unwrap();
        let u = c(0.0, 2.0);
        assert_eq!(id.closed_form(0.0, 3.0, &[u]).unwrap().unwrap(), (c(0.0, 0.0), vec![u]));
        let noise = ar1_gaussian(&[0.0], 1.5).unwrap();
        let (phi, psi) = noise.closed_form(0.0, 1.0, &[u]).unwrap().unwrap();
        assert!((phi - 0.5 * 2.25 * u * u).norm() < 1e-15);
        assert_eq!(psi[0], c(0.0, 0.0));
    }

    #[test]
    fn recursion_agrees_with_closed_forms() {
        let ar = ar1_gaussian(&[0.9, -0.4, 1.2, 0.5], 0.3).unwrap();
        let dp = discrete_poisson(&[0.1, 0.6, 0.35, 0.8]).unwrap();
        let u = [c(0.0, 0.9)];
        for m in [&ar, &dp] {
            for n in 0..=4 {
                for k in n..=4 {
                    let (pr, sr) = difference_recursion(&m.params, n, k, &u).unwrap();
                    let (pc, sc) = m.closed_form(n as f64, k as f64, &u).unwrap().unwrap();
                    assert!((pr - pc).norm() < 1e-14, "{} {n} {k}", m.name);
                    assert!((sr[0] - sc[0]).norm() < 1e-14);
                }
            }
        }
    }
}
