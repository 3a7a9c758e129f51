//! Term-structure models: a state model, an initial forward curve and a loading field.

use std::fmt;
use std::sync::Arc;

use ajk_lk::{levy_khintchine_exponent, TimeFn};
use ajk_measure::{DriverMeasure, Error, Result};
use ajk_models::{vasicek_hjm_state, ModelSpec};
use num_complex::Complex64;

use crate::loadings::{discontinuous_loadings, gaussian_loadings, vasicek_loadings, Kernel, Loadings};

type C = Complex64;

/// Initial forward curve `T ↦ f(0,T)`.
#[derive(Clone)]
pub struct ForwardCurve(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl ForwardCurve {
    pub fn flat(r: f64) -> Self {
        ForwardCurve(Arc::new(move |_| r))
    }

    pub fn from_timefn(f: TimeFn) -> Self {
        ForwardCurve(Arc::new(move |t| f.eval(t)))
    }

    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ForwardCurve(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

impl fmt::Debug for ForwardCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ForwardCurve(..)")
    }
}

/// `f(t,T) = f(0,T) + ∫_{(0,t]} a(s,T) dX_s` with `X = (A_t, ∫_0^t r ds, r_t)`, started at `x0`.
#[derive(Debug, Clone)]
pub struct TermStructureModel {
    pub x_model: ModelSpec,
    pub x0: Vec<f64>,
    pub f0: ForwardCurve,
    pub loadings: Loadings,
}

impl TermStructureModel {
    pub fn new(x_model: ModelSpec, x0: Vec<f64>, f0: ForwardCurve, loadings: Loadings) -> Result<Self> {
        let d = x_model.params.d();
        if d != 3 || x0.len() != 3 {
            return Err(Error::PreconditionViolated(format!(
                "state must be (A, ∫r, r); got a {d}-dimensional model and x0 of length {}",
                x0.len()
            )));
        }
        let driver = &x_model.params.driver;
        if let Some(t) = loadings.jump_times.iter().find(|t| driver.atom_at(**t).is_none()) {
            return Err(Error::InvalidTimes(format!("loading jump time {t} is not an atom of the driver")));
        }
        Ok(TermStructureModel { x_model, x0, f0, loadings })
    }

    pub fn driver(&self) -> &DriverMeasure {
        &self.x_model.params.driver
    }

    pub fn horizon(&self) -> f64 {
        self.x_model.horizon()
    }
}

/// The curve `f(0,T) = e^{βT} r0 - ∫_{(0,T]} a¹(s,T) dA_s` for which `f(t,t) = r_t` off the
/// jump times. Needs the exponential kernel.
pub fn consistent_forward_curve(loadings: &Loadings, driver: &DriverMeasure, r0: f64) -> Result<ForwardCurve> {
    if loadings.kernel != Kernel::Exponential {
        return Err(Error::PreconditionViolated("short-rate consistent curve needs Vasiček-type loadings".into()));
    }
    let (l, drv, beta) = (loadings.clone(), driver.clone(), loadings.beta);
    Ok(ForwardCurve::from_fn(move |t| {
        let drift: f64 = drv.integrate(|s| l.small_a(s, t)[0], 0.0, t).unwrap_or(f64::NAN);
        (beta * t).exp() * r0 - drift
    }))
}

/// Vasiček term structure, with `N(0, γ²)` short-rate shocks at `jump_times` when given, and
/// the short-rate consistent initial curve.
pub fn vasicek_term_structure(
    alpha: f64,
    beta: f64,
    sigma: f64,
    gamma: f64,
    jump_times: &[f64],
    r0: f64,
    horizon: f64,
) -> Result<TermStructureModel> {
    let x_model = vasicek_hjm_state(alpha, beta, sigma, gamma, jump_times, horizon)?;
    let loadings = if jump_times.is_empty() {
        vasicek_loadings(alpha, beta, sigma)?
    } else {
        discontinuous_loadings(alpha, beta, sigma, gamma, jump_times)?
    };
    let f0 = consistent_forward_curve(&loadings, &x_model.params.driver, r0)?;
    TermStructureModel::new(x_model, vec![0.0, 0.0, r0], f0, loadings)
}

/// Vasiček state with the linear-kernel loadings and a given initial curve.
pub fn gaussian_term_structure(alpha: f64, beta: f64, sigma: f64, r0: f64, f0: ForwardCurve, horizon: f64) -> Result<TermStructureModel> {
    let x_model = vasicek_hjm_state(alpha, beta, sigma, 0.0, &[], horizon)?;
    TermStructureModel::new(x_model, vec![0.0, 0.0, r0], f0, gaussian_loadings(alpha, beta, sigma)?)
}

/// Largest violation of the drift condition at `(t,T)`.
///
/// Off the atoms this is `max_i |κ_i(t, -A(t,T))|` over the characteristics `(β_i, α_i, μ_i)`;
/// at an atom it is the larger of `|γ_0(t, -A)|` and `max_k |γ̄_k(t, -A)|`. Both say that
/// `exp(-∫ A(s,T) dX_s)` has no drift.
pub fn drift_residual(m: &TermStructureModel, t: f64, t_end: f64) -> Result<f64> {
    if t > t_end {
        return Err(Error::PreconditionViolated(format!("need t <= T, got {t} > {t_end}")));
    }
    let p = &m.x_model.params;
    let horizon = m.horizon();
    if t < 0.0 || t_end > horizon {
        return Err(Error::OutOfDomain { t: if t < 0.0 { t } else { t_end }, horizon });
    }
    let u: Vec<C> = m.loadings.big_a(t, t_end).iter().map(|a| C::new(-a, 0.0)).collect();
    let values: Vec<C> = if p.driver.atom_at(t).is_some() {
        let (g0, gbar) = p.gamma_eval(t, &u)?;
        std::iter::once(g0).chain(gbar).collect()
    } else {
        (0..=p.d())
            .map(|i| levy_khintchine_exponent(&p.shape, &p.beta_at(i, t), &p.alpha_at(i, t), &p.mu[i], t, &u))
            .collect::<Result<_>>()?
    };
    let worst = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !worst.is_finite() {
        return Err(Error::DivergentIntegral(format!("drift condition at ({t}, {t_end}) is not finite")));
    }
    Ok(worst)
}
