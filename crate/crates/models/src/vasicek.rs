//! Vasiček short rate `dr = (α + βr)dt + σdW`, optionally with `N(0, γ²)` shocks at fixed times.

use std::sync::Arc;

use ajk_lk::{AffineParameterSet, EnhancedJump, GammaSpec, StateSpaceShape};
use ajk_measure::{DriverMeasure, Error, Result};
use num_complex::Complex64;

use crate::{ExactSimulator, ModelSpec};

type C = Complex64;

/// `(∫ψ, ∫ψ²)` over `v ∈ [0, τ]` for `ψ(v) = c + k e^{βv}`.
fn exp_integrals(beta: f64, tau: f64, c: C, k: C) -> (C, C) {
    let e1 = (beta * tau).exp_m1() / beta;
    let e2 = (2.0 * beta * tau).exp_m1() / (2.0 * beta);
    (c * tau + k * e1, c * c * tau + 2.0 * c * k * e1 + k * k * e2)
}

fn check(beta: f64, sigma: f64) -> Result<()> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("mean reversion β = {beta} must be nonzero")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("volatility σ = {sigma} must be nonnegative")));
    }
    Ok(())
}

fn check_jumps(gamma: f64, jump_times: &[f64], horizon: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("jump standard deviation γ = {gamma} must be positive")));
    }
    if jump_times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidTimes("jump times must be strictly increasing".into()));
    }
    if jump_times.iter().any(|t| !(*t > 0.0 && *t <= horizon)) {
        return Err(Error::InvalidTimes(format!("jump times must lie in (0, {horizon}]")));
    }
    Ok(())
}

fn atoms_between(times: &[f64], s: f64, t: f64) -> impl Iterator<Item = f64> + '_ {
    times.iter().copied().filter(move |ti| s < *ti && *ti <= t)
}

/// One-factor Vasiček model, state `r`.
pub fn vasicek(alpha: f64, beta: f64, sigma: f64, horizon: f64) -> Result<ModelSpec> {
    check(beta, sigma)?;
    let mut spec = build_1d(alpha, beta, sigma, 0.0, &[], DriverMeasure::lebesgue(horizon)?)?;
    spec.name = "vasicek".into();
    Ok(spec)
}

/// Vasiček model whose short rate receives an independent `N(0, γ²)` shock at each jump time.
/// The driver carries a unit atom at every jump time.
pub fn discontinuous_vasicek(
    alpha: f64,
    beta: f64,
    sigma: f64,
    gamma: f64,
    jump_times: &[f64],
    horizon: f64,
) -> Result<ModelSpec> {
    check(beta, sigma)?;
    check_jumps(gamma, jump_times, horizon)?;
    let atoms: Vec<(f64, f64)> = jump_times.iter().map(|t| (*t, 1.0)).collect();
    let mut spec = build_1d(alpha, beta, sigma, gamma, jump_times, DriverMeasure::lebesgue_with_atoms(horizon, &atoms)?)?;
    spec.name = "discontinuous-vasicek".into();
    Ok(spec)
}

fn build_1d(alpha: f64, beta: f64, sigma: f64, gamma: f64, jump_times: &[f64], driver: DriverMeasure) -> Result<ModelSpec> {
    let mut params = AffineParameterSet::zero(StateSpaceShape::new(0, 1)?, driver)
        .with_beta(0, 0, alpha)
        .with_beta(1, 0, beta)
        .with_alpha(0, 0, 0, sigma * sigma);
    for t in jump_times {
        let jump = EnhancedJump { alpha: vec![vec![vec![gamma * gamma]]], ..Default::default() };
        params = params.with_gamma(*t, GammaSpec::Enhanced(jump));
    }
    let times = jump_times.to_vec();
    let closed = move |s: f64, t: f64, u: &[C]| {
        let u = u[0];
        let (i1, i2) = exp_integrals(beta, t - s, C::new(0.0, 0.0), u);
        let mut phi = alpha * i1 + 0.5 * sigma * sigma * i2;
        for ti in atoms_between(&times, s, t) {
            let psi = u * (beta * (t - ti)).exp();
            phi += 0.5 * gamma * gamma * psi * psi;
        }
        Ok((phi, vec![u * (beta * (t - s)).exp()]))
    };
    Ok(ModelSpec {
        name: String::new(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: Some(ExactSimulator::Vasicek {
            alpha,
            beta,
            sigma,
            gamma,
            jump_times: jump_times.to_vec(),
            hjm_state: false,
        }),
        notes: Vec::new(),
    })
}

/// Three-dimensional state `(A_t, ∫_0^t r ds, r_t)` of the (discontinuous) Vasiček model, with
/// `A_t = t + #{t_i ≤ t}`. Pass `gamma = 0` and no jump times for the continuous model.
pub fn vasicek_hjm_state(
    alpha: f64,
    beta: f64,
    sigma: f64,
    gamma: f64,
    jump_times: &[f64],
    horizon: f64,
) -> Result<ModelSpec> {
    check(beta, sigma)?;
    if !jump_times.is_empty() {
        check_jumps(gamma, jump_times, horizon)?;
    }
    let atoms: Vec<(f64, f64)> = jump_times.iter().map(|t| (*t, 1.0)).collect();
    let mut params = AffineParameterSet::zero(StateSpaceShape::new(0, 3)?, DriverMeasure::lebesgue_with_atoms(horizon, &atoms)?)
        .with_beta(0, 0, 1.0)
        .with_beta(0, 2, alpha)
        .with_beta(3, 1, 1.0)
        .with_beta(3, 2, beta)
        .with_alpha(0, 2, 2, sigma * sigma);
    for t in jump_times {
        let mut a = vec![vec![0.0; 3]; 3];
        a[2][2] = gamma * gamma;
        let jump = EnhancedJump { beta: vec![vec![1.0, 0.0, 0.0]], alpha: vec![a], ..Default::default() };
        params = params.with_gamma(*t, GammaSpec::Enhanced(jump));
    }
    let times = jump_times.to_vec();
    let closed = move |s: f64, t: f64, u: &[C]| {
        // ψ_3(r) = c + k e^{β(t-r)}, ψ_1 = u_1, ψ_2 = u_2
        let c = -u[1] / beta;
        let k = u[2] + u[1] / beta;
        let (i1, i2) = exp_integrals(beta, t - s, c, k);
        let mut phi = u[0] * (t - s) + alpha * i1 + 0.5 * sigma * sigma * i2;
        for ti in atoms_between(&times, s, t) {
            let psi3 = c + k * (beta * (t - ti)).exp();
            phi += u[0] + 0.5 * gamma * gamma * psi3 * psi3;
        }
        Ok((phi, vec![u[0], u[1], c + k * (beta * (t - s)).exp()]))
    };
    Ok(ModelSpec {
        name: "vasicek-hjm".into(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: Some(ExactSimulator::Vasicek {
            alpha,
            beta,
            sigma,
            gamma,
            jump_times: jump_times.to_vec(),
            hjm_state: true,
        }),
        notes: Vec::new(),
    })
}
