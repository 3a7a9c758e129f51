//! Loading fields `A(t,T) = ∫_{[t,T]} a(t,u) dA_u` for the state `X = (A_t, ∫_0^t r ds, r_t)`.
//!
//! Every family here has the form
//!
//! ```text
//! A³(t,T) = E(T-t) + #{t_i ∈ [t,T]}
//! A²(t,T) = -β A³(t,T)
//! A¹(t,T) = ½σ²(A³)² - αA³      off the jump times
//! A¹(t,T) = ½γ²(A³)²            at a jump time t = t_i
//! ```
//!
//! with `E(τ) = (e^{βτ} - 1)/β` (exponential kernel) or `E(τ) = τ` (linear kernel).

use ajk_measure::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Zero,
    Exponential,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loadings {
    pub kernel: Kernel,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    /// Standard deviation of the short-rate shock at each jump time.
    pub gamma: f64,
    pub jump_times: Vec<f64>,
    /// Multiplies the first component; `1` everywhere except in deliberately broken models.
    pub a1_scale: f64,
}

/// Which field a path integral runs against: `A(·,T)` or the forward loading `a(·,u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    Big(f64),
    Small(f64),
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be finite")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("volatility σ = {sigma} must be nonnegative")))
    }
}

impl Loadings {
    pub fn zero() -> Self {
        Loadings { kernel: Kernel::Zero, alpha: 0.0, beta: 0.0, sigma: 0.0, gamma: 0.0, jump_times: Vec::new(), a1_scale: 1.0 }
    }

    /// Same field with the first component multiplied by `factor`.
    pub fn perturbed(&self, factor: f64) -> Self {
        Loadings { a1_scale: self.a1_scale * factor, ..self.clone() }
    }

    pub fn is_jump_time(&self, t: f64) -> bool {
        self.jump_times.binary_search_by(|x| x.total_cmp(&t)).is_ok()
    }

    /// `#{t_i ∈ [s,T]}`, or `#{t_i ∈ (s,T]}` when `closed` is false.
    fn count(&self, s: f64, t: f64, closed: bool) -> f64 {
        self.jump_times.iter().filter(|ti| (if closed { **ti >= s } else { **ti > s }) && **ti <= t).count() as f64
    }

    /// `E(τ)` and its first three derivatives.
    fn kernel(&self, tau: f64) -> [f64; 4] {
        match self.kernel {
            Kernel::Zero => [0.0; 4],
            Kernel::Linear => [tau, 1.0, 0.0, 0.0],
            Kernel::Exponential => {
                let b = self.beta;
                let e = (b * tau).exp();
                [(b * tau).exp_m1() / b, e, b * e, b * b * e]
            }
        }
    }

    /// `(c, α')` in `A¹ = ½c(A³)² - α'A³`.
    fn quad_coeffs(&self, at_jump: bool) -> (f64, f64) {
        if at_jump {
            (self.gamma * self.gamma, 0.0)
        } else {
            (self.sigma * self.sigma, self.alpha)
        }
    }

    fn assemble(&self, a3: f64, at_jump: bool) -> [f64; 3] {
        let (c, a) = self.quad_coeffs(at_jump);
        [self.a1_scale * (0.5 * c * a3 * a3 - a * a3), -self.beta * a3, a3]
    }

    /// `A(t,T)` for `t <= T`.
    pub fn big_a(&self, t: f64, t_end: f64) -> [f64; 3] {
        let a3 = self.kernel(t_end - t)[0] + self.count(t, t_end, true);
        self.assemble(a3, self.is_jump_time(t))
    }

    /// Right limit `A(t+,T)`: a jump at `t` itself no longer counts.
    pub fn big_a_after(&self, t: f64, t_end: f64) -> [f64; 3] {
        let a3 = self.kernel(t_end - t)[0] + self.count(t, t_end, false);
        self.assemble(a3, false)
    }

    /// Forward loading `a(s,u) = ∂_u A(s,u)` at a time `u` that is not a jump time.
    pub fn small_a(&self, s: f64, u: f64) -> [f64; 3] {
        let a3 = self.kernel(u - s)[1];
        let big3 = self.kernel(u - s)[0] + self.count(s, u, true);
        let (c, a) = self.quad_coeffs(self.is_jump_time(s));
        [self.a1_scale * (c * big3 - a) * a3, -self.beta * a3, a3]
    }

    pub(crate) fn value(&self, f: Field, s: f64) -> [f64; 3] {
        match f {
            Field::Big(t) => self.big_a(s, t),
            Field::Small(u) => self.small_a(s, u),
        }
    }

    pub(crate) fn value_after(&self, f: Field, s: f64) -> [f64; 3] {
        match f {
            Field::Big(t) => self.big_a_after(s, t),
            Field::Small(u) => self.small_a(s, u),
        }
    }

    /// `∂_s g³(s)` for `g = A(·,T)` or `a(·,u)`.
    pub(crate) fn d3(&self, f: Field, s: f64) -> f64 {
        match f {
            Field::Big(t) => -self.kernel(t - s)[1],
            Field::Small(u) => -self.kernel(u - s)[2],
        }
    }

    /// `∂²_s g³ - ∂_s g²`, the density left over once both stochastic components are
    /// integrated by parts against `R`.
    pub(crate) fn remainder(&self, f: Field, s: f64) -> f64 {
        let (k, i) = match f {
            Field::Big(t) => (self.kernel(t - s), 1),
            Field::Small(u) => (self.kernel(u - s), 2),
        };
        k[i + 1] - self.beta * k[i]
    }

    /// True when [`remainder`](Self::remainder) is identically zero.
    pub(crate) fn remainder_vanishes(&self, f: Field) -> bool {
        match (self.kernel, f) {
            (Kernel::Zero | Kernel::Exponential, _) => true,
            (Kernel::Linear, Field::Small(_)) => true,
            (Kernel::Linear, Field::Big(_)) => self.beta == 0.0,
        }
    }
}

/// Loadings of the Vasiček model `dr = (α + βr)dt + σdW`.
pub fn vasicek_loadings(alpha: f64, beta: f64, sigma: f64) -> Result<Loadings> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean reversion β = {beta} must be nonzero; use gaussian_loadings for β = 0"
        )));
    }
    check_finite("alpha", alpha)?;
    check_sigma(sigma)?;
    Ok(Loadings { kernel: Kernel::Exponential, alpha, beta, sigma, ..Loadings::zero() })
}

/// `A³(t,T) = T - t`, `A² = -βA³`, `A¹ = ½σ²(T-t)² - α(T-t)`, driven by the same Vasiček state.
pub fn gaussian_loadings(alpha: f64, beta: f64, sigma: f64) -> Result<Loadings> {
    check_finite("alpha", alpha)?;
    check_finite("beta", beta)?;
    check_sigma(sigma)?;
    Ok(Loadings { kernel: Kernel::Linear, alpha, beta, sigma, ..Loadings::zero() })
}

/// Vasiček loadings plus a unit of `A³` for every jump time in `[t,T]`, with
/// `A¹(t_i,T) = ½(γA³(t_i,T))²` at the jump times.
pub fn discontinuous_loadings(alpha: f64, beta: f64, sigma: f64, gamma: f64, jump_times: &[f64]) -> Result<Loadings> {
    let base = vasicek_loadings(alpha, beta, sigma)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("jump standard deviation γ = {gamma} must be positive")));
    }
    if jump_times.iter().any(|t| !(t.is_finite() && *t > 0.0)) || jump_times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidTimes("jump times must be positive and strictly increasing".into()));
    }
    Ok(Loadings { gamma, jump_times: jump_times.to_vec(), ..base })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn substitution_examples() {
        let v = vasicek_loadings(0.05, -1.0, 0.2).unwrap();
        let a3 = 1.0 - (-1.0f64).exp();
        let expect = [0.5 * 0.04 * a3 * a3 - 0.05 * a3, a3, a3];
        assert!(close(v.big_a(0.5, 1.5), expect, 1e-15));
        assert_eq!(v.big_a(2.0, 2.0), [0.0, 0.0, 0.0]);

        let g = gaussian_loadings(0.05, -0.3, 0.2).unwrap();
        assert!((g.big_a(1.0, 3.0)[0] + 0.02).abs() < 1e-15);
        assert_eq!(g.big_a(1.0, 1.0), [0.0, 0.0, 0.0]);
        assert_eq!(gaussian_loadings(0.0, -0.3, 0.0).unwrap().big_a(0.0, 4.0)[0], 0.0);
        assert!(vasicek_loadings(0.05, 0.0, 0.2).is_err());
    }

    #[test]
    fn jump_times_in_discontinuous_family() {
        let (a, b, s, g) = (0.03, -0.7, 0.1, 0.25);
        let v = vasicek_loadings(a, b, s).unwrap();
        let d = discontinuous_loadings(a, b, s, g, &[1.0, 2.0]).unwrap();
        // at a jump time the first component is ½(γA³)²
        let big = d.big_a(1.0, 3.0);
        assert!((big[0] - 0.5 * (g * big[2]).powi(2)).abs() < 1e-15);
        assert!((big[2] - v.big_a(1.0, 3.0)[2] - 2.0).abs() < 1e-14);
        // after the last jump: plain Vasiček
        assert_eq!(d.big_a(2.5, 4.0), v.big_a(2.5, 4.0));
        assert_eq!(d.big_a_after(2.0, 4.0), v.big_a(2.0, 4.0));
        let none = discontinuous_loadings(a, b, s, g, &[]).unwrap();
        assert_eq!(none.big_a(0.3, 2.0), v.big_a(0.3, 2.0));
        assert!(matches!(discontinuous_loadings(a, b, s, g, &[2.0, 1.0]), Err(Error::InvalidTimes(_))));
    }

    #[test]
    fn forward_loading_is_the_maturity_derivative() {
        let d = discontinuous_loadings(0.02, -0.4, 0.15, 0.2, &[1.0]).unwrap();
        let g = gaussian_loadings(0.02, -0.4, 0.15).unwrap();
        let h = 1e-6;
        for l in [&d, &g] {
            for (s, u) in [(0.2, 0.8), (0.2, 1.7), (1.0, 1.4)] {
                let up = l.big_a(s, u + h);
                let dn = l.big_a(s, u - h);
                let a = l.small_a(s, u);
                for k in 0..3 {
                    assert!(((up[k] - dn[k]) / (2.0 * h) - a[k]).abs() < 1e-7, "{s} {u} {k}");
                }
            }
        }
    }

    #[test]
    fn time_derivatives() {
        let d = discontinuous_loadings(0.02, -0.4, 0.15, 0.2, &[1.0]).unwrap();
        let g = gaussian_loadings(0.02, -0.4, 0.15).unwrap();
        let h = 1e-5;
        for l in [&d, &g] {
            for f in [Field::Big(2.0), Field::Small(1.5)] {
                let s = 0.4;
                let v = |s: f64| l.value(f, s);
                let d3 = (v(s + h)[2] - v(s - h)[2]) / (2.0 * h);
                let d2 = (v(s + h)[1] - v(s - h)[1]) / (2.0 * h);
                let dd3 = (v(s + h)[2] - 2.0 * v(s)[2] + v(s - h)[2]) / (h * h);
                assert!((l.d3(f, s) - d3).abs() < 1e-8);
                assert!((l.remainder(f, s) - (dd3 - d2)).abs() < 1e-4);
            }
        }
    }
}
