//! Poisson process, and the Poisson process with a state-dependent normal jump at a fixed time.

use std::sync::Arc;

use ajk_lk::{AffineParameterSet, GammaSpec, JumpMeasureSpec, StateSpaceShape};
use ajk_measure::{DriverMeasure, Error, Result};
use num_complex::Complex64;

use crate::{ExactSimulator, ModelSpec};

type C = Complex64;

fn check_rate(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidRate(format!("intensity {lambda} must be positive")));
    }
    Ok(())
}

fn poisson_params(lambda: f64, driver: DriverMeasure) -> Result<AffineParameterSet> {
    Ok(AffineParameterSet::zero(StateSpaceShape::new(1, 0)?, driver)
        .with_beta(0, 0, lambda)
        .with_mu(0, JumpMeasureSpec::point_mass(vec![1.0], lambda)))
}

/// Homogeneous Poisson process with intensity `λ` on `[0, horizon]`.
pub fn poisson(lambda: f64, horizon: f64) -> Result<ModelSpec> {
    check_rate(lambda)?;
    let params = poisson_params(lambda, DriverMeasure::lebesgue(horizon)?)?;
    let closed = move |s: f64, t: f64, u: &[C]| Ok((lambda * (t - s) * (u[0].exp() - 1.0), u.to_vec()));
    Ok(ModelSpec {
        name: "poisson".into(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: Some(ExactSimulator::Poisson { lambda, normal_jump_at: None }),
        notes: Vec::new(),
    })
}

/// `X_t = N_t + 1{t ≥ τ}(η + Z √N_τ)` with `η = ±1` equally likely and `Z ~ N(0,1)`.
///
/// At `τ`: `E[e^{uX_τ} | X_{τ-}] = exp(log cosh u + (u + u²/2) X_{τ-})`.
pub fn poisson_with_normal_jump(lambda: f64, tau: f64, horizon: f64) -> Result<ModelSpec> {
    check_rate(lambda)?;
    if !(tau > 0.0 && tau <= horizon) {
        return Err(Error::InvalidTimes(format!("jump time {tau} not in (0, {horizon}]")));
    }
    let driver = DriverMeasure::lebesgue_with_atoms(horizon, &[(tau, 1.0)])?;
    let params = poisson_params(lambda, driver)?
        .with_gamma(tau, GammaSpec::black_box(|u: &[C]| Ok((u[0].cosh().ln(), vec![0.5 * u[0] * u[0]]))));
    let closed = move |s: f64, t: f64, u: &[C]| {
        let u = u[0];
        let pois = |len: f64, v: C| lambda * len * (v.exp() - 1.0);
        if s < tau && tau <= t {
            let v = u + 0.5 * u * u;
            Ok((pois(t - tau, u) + u.cosh().ln() + pois(tau - s, v), vec![v]))
        } else {
            Ok((pois(t - s, u), vec![u]))
        }
    };
    Ok(ModelSpec {
        name: "poisson-normal-jump".into(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: Some(ExactSimulator::Poisson { lambda, normal_jump_at: Some(tau) }),
        notes: vec![
            "the jump at tau can leave the nonnegative half-line; the support condition fails".into(),
            "jump transform given as a black box: Fourier positivity is not checked".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_switches_exponents() {
        let m = poisson_with_normal_jump(1.5, 1.0, 2.0).unwrap();
        let u = C::new(0.0, 0.6);
        let (phi, psi) = m.closed_form(0.5, 1.5, &[u]).unwrap().unwrap();
        let v = u + 0.5 * u * u;
        assert!((psi[0] - v).norm() < 1e-15);
        let expect = 1.5 * 0.5 * (u.exp() - 1.0) + u.cosh().ln() + 1.5 * 0.5 * (v.exp() - 1.0);
        assert!((phi - expect).norm() < 1e-15);
        // τ > t and τ <= s: plain Poisson
        let plain = poisson(1.5, 2.0).unwrap();
        for (s, t) in [(0.0, 0.9), (1.0, 2.0)] {
            assert_eq!(m.closed_form(s, t, &[u]).unwrap().unwrap(), plain.closed_form(s, t, &[u]).unwrap().unwrap());
        }
        let z = C::new(0.0, 0.0);
        assert_eq!(m.closed_form(0.0, 2.0, &[z]).unwrap().unwrap(), (z, vec![z]));
    }

    #[test]
    fn rejects_nonpositive_rate() {
        assert!(matches!(poisson_with_normal_jump(0.0, 1.0, 2.0), Err(Error::InvalidRate(_))));
        assert!(matches!(poisson(-1.0, 1.0), Err(Error::InvalidRate(_))));
    }
}
