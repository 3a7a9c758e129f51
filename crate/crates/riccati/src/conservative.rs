//! Numerical probe for conservativeness.
//!
//! `g ≡ 0` must solve `dg/dA = -Re R^I(t, g)`, `g_T = 0`, and should be the only
//! nonpositive solution. The probe checks the zero residual and then starts from
//! `g_T = -ε·1` for several small `ε`: when zero is the unique solution the response is
//! linear in `ε`, so `g_0 / ε` must agree across `ε`.

use std::fmt;

use ajk_lk::AffineParameterSet;
use ajk_measure::{Error, Result};
use num_complex::Complex64;

use crate::solve::{solve_backward_with, RiccatiOptions};

pub const EPSILONS: [f64; 2] = [1e-6, 1e-4];
/// Allowed relative spread of `g_0 / ε` across the perturbations.
const LINEAR_TOL: f64 = 0.05;
const ZERO_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Conservative,
    Inconclusive(String),
}

#[derive(Debug, Clone)]
pub struct ConservativenessReport {
    pub verdict: Verdict,
    pub zero_residual: f64,
    /// `g_0 / ε` on the nonnegative coordinates, per `ε` (empty when a probe failed).
    pub responses: Vec<Vec<f64>>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Conservative => f.write_str("conservative (numerically)"),
            Verdict::Inconclusive(why) => write!(f, "inconclusive: {why}"),
        }
    }
}

fn zero_residual(p: &AffineParameterSet, t_terminal: f64) -> Result<f64> {
    let d = p.d();
    let zero = vec![Complex64::new(0.0, 0.0); d];
    let mut worst = 0.0f64;
    for seg in p.driver.segments() {
        if seg.density.is_zero() || seg.t0 >= t_terminal {
            continue;
        }
        let hi = seg.t1.min(t_terminal);
        for k in 0..=16 {
            let t = seg.t0 + (hi - seg.t0) * k as f64 / 16.0;
            let (_, r) = p.fr_unchecked(t, &zero)?;
            worst = r.iter().take(p.shape.m).fold(worst, |w, v| w.max(v.re.abs()));
        }
    }
    for atom in p.driver.atoms_in(0.0, t_terminal) {
        let (_, gb) = p.gamma_unchecked(atom.t, &zero)?;
        worst = gb.iter().take(p.shape.m).fold(worst, |w, v| w.max(v.re.abs()));
    }
    Ok(worst)
}

pub fn conservativeness_check(p: &AffineParameterSet, t_terminal: f64) -> Result<ConservativenessReport> {
    let m = p.shape.m;
    if m == 0 {
        return Ok(ConservativenessReport { verdict: Verdict::Conservative, zero_residual: 0.0, responses: Vec::new() });
    }
    let zero_residual = zero_residual(p, t_terminal)?;
    if zero_residual > ZERO_TOL {
        return Ok(ConservativenessReport {
            verdict: Verdict::Inconclusive(format!("g = 0 is not a solution (residual {zero_residual:e})")),
            zero_residual,
            responses: Vec::new(),
        });
    }
    let mut responses = Vec::new();
    for eps in EPSILONS {
        let mut u = vec![Complex64::new(0.0, 0.0); p.d()];
        for v in u.iter_mut().take(m) {
            v.re = -eps;
        }
        let mut opts = RiccatiOptions::default();
        // g is of order ε: keep the absolute tolerance relative to it
        opts.ode.atol *= eps;
        match solve_backward_with(p, t_terminal, &u, 0.0, &opts) {
            Ok(sol) => {
                let psi = sol.psi(0.0)?;
                let g: Vec<f64> = psi.iter().take(m).map(|v| v.re / eps).collect();
                if g.iter().any(|v| !v.is_finite() || *v > 0.0) {
                    return Ok(ConservativenessReport {
                        verdict: Verdict::Inconclusive(format!("perturbation {eps:e} left the nonpositive orthant")),
                        zero_residual,
                        responses,
                    });
                }
                responses.push(g);
            }
            Err(e @ (Error::BlowUp { .. } | Error::DomainExit { .. } | Error::StepSizeUnderflow { .. })) => {
                return Ok(ConservativenessReport {
                    verdict: Verdict::Inconclusive(format!("perturbation {eps:e}: {e}")),
                    zero_residual,
                    responses,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let (a, b) = (&responses[0], &responses[1]);
    for (x, y) in a.iter().zip(b) {
        let spread = (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
        if spread > LINEAR_TOL {
            return Ok(ConservativenessReport {
                verdict: Verdict::Inconclusive(format!("response to perturbations is not linear (g/ε = {x} vs {y})")),
                zero_residual,
                responses,
            });
        }
    }
    Ok(ConservativenessReport { verdict: Verdict::Conservative, zero_residual, responses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ajk_lk::StateSpaceShape;
    use ajk_measure::DriverMeasure;

    #[test]
    fn cir_is_conservative_and_matches_logistic_solution() {
        let (kappa, s2, t) = (0.9, 0.3, 2.0);
        let p = AffineParameterSet::zero(StateSpaceShape::new(1, 0).unwrap(), DriverMeasure::lebesgue(t).unwrap())
            .with_beta(0, 0, 0.1)
            .with_beta(1, 0, -kappa)
            .with_alpha(1, 0, 0, s2);
        let rep = conservativeness_check(&p, t).unwrap();
        assert_eq!(rep.verdict, Verdict::Conservative);
        assert_eq!(rep.zero_residual, 0.0);
        // g' = -κg + ½σ²g² backward in time: g(τ) = κ g_T e^{-κτ} / (κ - ½σ² g_T (1 - e^{-κτ}))
        for (eps, resp) in EPSILONS.iter().zip(&rep.responses) {
            let gt = -eps;
            let e = (-kappa * t).exp();
            let g = kappa * gt * e / (kappa - 0.5 * s2 * gt * (1.0 - e));
            assert!((resp[0] - g / eps).abs() < 1e-8, "{} vs {}", resp[0], g / eps);
        }
    }

    #[test]
    fn trivial_cases() {
        let z = AffineParameterSet::zero(StateSpaceShape::new(1, 1).unwrap(), DriverMeasure::lebesgue(1.0).unwrap());
        assert_eq!(conservativeness_check(&z, 1.0).unwrap().verdict, Verdict::Conservative);
        let v = AffineParameterSet::zero(StateSpaceShape::new(0, 1).unwrap(), DriverMeasure::lebesgue(1.0).unwrap())
            .with_beta(1, 0, -0.5);
        assert_eq!(conservativeness_check(&v, 1.0).unwrap().verdict, Verdict::Conservative);
    }

    #[test]
    fn explosive_fixture_is_inconclusive() {
        let p = AffineParameterSet::zero(StateSpaceShape::new(1, 0).unwrap(), DriverMeasure::lebesgue(1.0).unwrap())
            .with_alpha(1, 0, 0, -1e6);
        let rep = conservativeness_check(&p, 1.0).unwrap();
        assert!(matches!(rep.verdict, Verdict::Inconclusive(_)));
        assert!(rep.verdict.to_string().starts_with("inconclusive"));
    }
}
