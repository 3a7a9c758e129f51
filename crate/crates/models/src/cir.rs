//! Square-root diffusion `dX = (a0 - κX)dt + σ√X dW` on the half-line.

use std::sync::Arc;

use ajk_lk::{AffineParameterSet, StateSpaceShape};
use ajk_measure::{DriverMeasure, Error, Result};
use num_complex::Complex64;

use crate::{ExactSimulator, ModelSpec};

type C = Complex64;

pub fn cir_type(kappa: f64, sigma: f64, a0: f64, horizon: f64) -> Result<ModelSpec> {
    for (name, v) in [("kappa", kappa), ("sigma", sigma), ("a0", a0)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be nonnegative")));
        }
    }
    let params = AffineParameterSet::zero(StateSpaceShape::new(1, 0)?, DriverMeasure::lebesgue(horizon)?)
        .with_beta(0, 0, a0)
        .with_beta(1, 0, -kappa)
        .with_alpha(1, 0, 0, sigma * sigma);
    let closed = move |s: f64, t: f64, u: &[C]| {
        let tau = t - s;
        let u = u[0];
        // q = (1 - e^{-κτ}) / κ, ψ = u e^{-κτ} / (1 - ½σ²uq), φ = -(2a0/σ²) log(1 - ½σ²uq)
        let q = if kappa == 0.0 { tau } else { -(-kappa * tau).exp_m1() / kappa };
        let h = 0.5 * sigma * sigma;
        let den = 1.0 - h * u * q;
        let psi = u * (-kappa * tau).exp() / den;
        let phi = if sigma == 0.0 { a0 * u * q } else { -(a0 / h) * den.ln() };
        Ok((phi, vec![psi]))
    };
    Ok(ModelSpec {
        name: "cir".into(),
        params,
        closed_form: Some(Arc::new(closed)),
        simulator: Some(ExactSimulator::Cir { kappa, sigma, a0 }),
        notes: Vec::new(),
    })
}
