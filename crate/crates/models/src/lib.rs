//! Ready-made affine parameter sets with closed-form exponents.

pub mod cir;
pub mod discrete;
pub mod poisson;
pub mod registry;
pub mod vasicek;

use std::fmt;
use std::sync::Arc;

use ajk_lk::{AffineParameterSet, StateSpaceShape};
use ajk_measure::{DriverMeasure, Result};
use num_complex::Complex64;

pub use cir::cir_type;
pub use discrete::{ar1_embed, ar1_gaussian, difference_recursion, discrete_poisson};
pub use poisson::{poisson, poisson_with_normal_jump};
pub use registry::{catalog_names, from_name, ModelArgs};
pub use vasicek::{discontinuous_vasicek, vasicek, vasicek_hjm_state};

type C = Complex64;

/// `(s, t, u) ↦ (φ_s(t,u), ψ_s(t,u))`.
pub type ClosedForm = Arc<dyn Fn(f64, f64, &[C]) -> Result<(C, Vec<C>)> + Send + Sync>;

/// Exact transition laws known to the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSimulator {
    /// Unit jumps at the integers `n = 1, 2, …` with probability `probs[n-1]`.
    Bernoulli { probs: Vec<f64> },
    /// Poisson process, optionally with the jump `η + Z √N_τ` at `τ` (`η = ±1`, `Z ~ N(0,1)`).
    Poisson { lambda: f64, normal_jump_at: Option<f64> },
    /// `dr = (α + βr)dt + σdW` plus `N(0, γ²)` shocks at `jump_times`.
    /// With `hjm_state` the state is `(A_t, ∫r ds, r_t)`, otherwise `r_t`.
    Vasicek { alpha: f64, beta: f64, sigma: f64, gamma: f64, jump_times: Vec<f64>, hjm_state: bool },
    /// `dX = (a0 - κX)dt + σ√X dW` via the noncentral chi-square law.
    Cir { kappa: f64, sigma: f64, a0: f64 },
    /// `X_n = α(n) X_{n-1} + σ ε_n` with standard normal `ε_n`.
    Ar1Gaussian { alpha: Vec<f64>, sigma: f64 },
    /// Deterministic constant paths.
    Constant,
}

#[derive(Clone)]
pub struct ModelSpec {
    pub name: String,
    pub params: AffineParameterSet,
    pub closed_form: Option<ClosedForm>,
    pub simulator: Option<ExactSimulator>,
    pub notes: Vec<String>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("shape", &self.params.shape)
            .field("closed_form", &self.closed_form.is_some())
            .field("simulator", &self.simulator)
            .finish()
    }
}

impl ModelSpec {
    pub fn horizon(&self) -> f64 {
        self.params.driver.horizon()
    }

    pub fn closed_form(&self, s: f64, t: f64, u: &[C]) -> Option<Result<(C, Vec<C>)>> {
        self.closed_form.as_ref().map(|f| f(s, t, u))
    }
}

/// All parameters zero on a Lebesgue driver.
pub fn zero(shape: StateSpaceShape, horizon: f64) -> Result<ModelSpec> {
    let params = AffineParameterSet::zero(shape, DriverMeasure::lebesgue(horizon)?);
    Ok(ModelSpec {
        name: "zero".into(),
        params,
        closed_form: Some(Arc::new(|_s, _t, u: &[C]| Ok((C::new(0.0, 0.0), u.to_vec())))),
        simulator: Some(ExactSimulator::Constant),
        notes: Vec::new(),
    })
}
