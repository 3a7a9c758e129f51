//! Backward solution of
//!
//! ```text
//! dφ/dA^c = -F(t, ψ),   dψ/dA^c = -R(t, ψ)                 between atoms
//! φ(t-) = φ(t) + γ_0(t, ψ(t)),   ψ(t-) = ψ(t) + γ̄(t, ψ(t))   at atoms
//! ```
//!
//! from `φ(T) = 0`, `ψ(T) = u`. The state is stored as one vector `[φ, ψ_1, …, ψ_d]`.

use ajk_lk::AffineParameterSet;
use ajk_measure::{solve_backward as mde_solve, BackwardProblem, Error, OdeOptions, Result, StieltjesTrajectory};
use num_complex::Complex64;

type C = Complex64;

/// Real parts on real coordinates below this are set to zero after every step.
pub const PROJECT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiOptions {
    pub ode: OdeOptions,
    /// `‖ψ‖` above this aborts with `BlowUp`.
    pub blowup_cap: f64,
    /// Allowed `Re ψ^k` on nonnegative coordinates (and `|Re ψ^k|` on real ones) before `DomainExit`.
    pub domain_tol: f64,
    /// Extra times the integrator must land on exactly.
    pub stops: Vec<f64>,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        RiccatiOptions { ode: OdeOptions::default(), blowup_cap: 1e8, domain_tol: 1e-9, stops: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpLogEntry {
    pub t: f64,
    /// `Δφ_t = φ_t - φ_{t-}`.
    pub dphi: C,
    /// `Δψ_t = ψ_t - ψ_{t-}`.
    pub dpsi: Vec<C>,
    /// `ψ_t`, the argument at which `γ` was evaluated.
    pub psi_right: Vec<C>,
}

#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub t_terminal: f64,
    pub t_end: f64,
    pub u: Vec<C>,
    /// `[φ, ψ]` as one trajectory.
    pub trajectory: StieltjesTrajectory<Vec<C>>,
    /// Atoms crossed, in decreasing time.
    pub jump_log: Vec<JumpLogEntry>,
    pub steps: usize,
}

impl RiccatiSolution {
    fn split(v: &[C]) -> (C, Vec<C>) {
        (v[0], v[1..].to_vec())
    }

    /// `(φ_s(T,u), ψ_s(T,u))`; exact at nodes, Hermite-interpolated in between.
    pub fn at(&self, s: f64) -> Result<(C, Vec<C>)> {
        self.trajectory
            .value(s)
            .map(|v| Self::split(&v))
            .ok_or(Error::OutOfDomain { t: s, horizon: self.t_terminal })
    }

    /// Left limits `(φ_{t-}, ψ_{t-})` at an atom that was crossed.
    pub fn left_limit(&self, t: f64) -> Option<(C, Vec<C>)> {
        self.trajectory.left_limit(t).map(|v| Self::split(v))
    }

    pub fn phi(&self, s: f64) -> Result<C> {
        self.at(s).map(|x| x.0)
    }

    pub fn psi(&self, s: f64) -> Result<Vec<C>> {
        self.at(s).map(|x| x.1)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.trajectory.breakpoints()
    }
}

struct RiccatiProblem<'a> {
    p: &'a AffineParameterSet,
    opts: &'a RiccatiOptions,
}

impl BackwardProblem<Vec<C>> for RiccatiProblem<'_> {
    fn deriv(&self, t: f64, y: &Vec<C>) -> Result<Vec<C>> {
        let (f, r) = self.p.fr_unchecked(t, &y[1..])?;
        let mut out = Vec::with_capacity(y.len());
        out.push(-f);
        out.extend(r.into_iter().map(|v| -v));
        Ok(out)
    }

    fn jump(&self, t: f64, _da: f64, y: &Vec<C>) -> Result<Vec<C>> {
        let (g0, gb) = self.p.gamma_unchecked(t, &y[1..])?;
        let mut out = y.clone();
        out[0] += g0;
        for (o, g) in out[1..].iter_mut().zip(gb) {
            *o += g;
        }
        Ok(out)
    }

    fn check(&self, t: f64, y: &mut Vec<C>) -> Result<bool> {
        let m = self.p.shape.m;
        let norm = y[1..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > self.opts.blowup_cap || !y[0].re.is_finite() || !y[0].im.is_finite() {
            return Err(Error::BlowUp { t, norm });
        }
        let mut changed = false;
        for (k, v) in y[1..].iter_mut().enumerate() {
            if k < m {
                if v.re > self.opts.domain_tol {
                    return Err(Error::DomainExit { t, detail: format!("Re psi_{} = {:e} > 0", k + 1, v.re) });
                }
            } else if v.re != 0.0 {
                if v.re.abs() < PROJECT_TOL {
                    v.re = 0.0;
                    changed = true;
                } else if v.re.abs() > self.opts.domain_tol {
                    return Err(Error::DomainExit { t, detail: format!("Re psi_{} = {:e} on a real coordinate", k + 1, v.re) });
                }
            }
        }
        Ok(changed)
    }
}

/// Solves from `(T, u)` down to `t = 0`.
pub fn solve_backward(p: &AffineParameterSet, t_terminal: f64, u: &[C]) -> Result<RiccatiSolution> {
    solve_backward_with(p, t_terminal, u, 0.0, &RiccatiOptions::default())
}

/// Solves from `(T, u)` down to `t_end`; an atom at `t_end` is not crossed.
pub fn solve_backward_with(
    p: &AffineParameterSet,
    t_terminal: f64,
    u: &[C],
    t_end: f64,
    opts: &RiccatiOptions,
) -> Result<RiccatiSolution> {
    p.shape.check_u(u)?;
    let problem = RiccatiProblem { p, opts };
    let mut y0 = Vec::with_capacity(u.len() + 1);
    y0.push(C::new(0.0, 0.0));
    y0.extend_from_slice(u);
    let sol = mde_solve(&p.driver, &problem, y0, t_terminal, t_end, &opts.stops, &opts.ode)?;
    let jump_log = sol
        .jumps
        .iter()
        .map(|j| JumpLogEntry {
            t: j.t,
            dphi: j.right[0] - j.left[0],
            dpsi: j.right[1..].iter().zip(&j.left[1..]).map(|(r, l)| r - l).collect(),
            psi_right: j.right[1..].to_vec(),
        })
        .collect();
    Ok(RiccatiSolution {
        t_terminal,
        t_end,
        u: u.to_vec(),
        trajectory: sol.trajectory,
        jump_log,
        steps: sol.steps,
    })
}

/// `E[e^{<u,X_T>} | X_s = x] = exp(φ_s(T,u) + <ψ_s(T,u), x>)`.
pub fn char_fn(sol: &RiccatiSolution, s: f64, x: &[f64]) -> Result<C> {
    if s < sol.t_end || s > sol.t_terminal {
        return Err(Error::OutOfDomain { t: s, horizon: sol.t_terminal });
    }
    let (phi, psi) = sol.at(s)?;
    if x.len() != psi.len() {
        return Err(Error::PreconditionViolated(format!("state has {} components, expected {}", x.len(), psi.len())));
    }
    let dot: C = psi.iter().zip(x).map(|(p, xi)| p * *xi).sum();
    Ok((phi + dot).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiflowResiduals {
    pub phi: f64,
    pub psi: f64,
}

/// Largest deviation, over the solver nodes `s <= r`, between the direct solution from `(T,u)`
/// and the composition `φ_r(T,u) + φ_s(r, ψ_r(T,u))`, `ψ_s(r, ψ_r(T,u))`.
pub fn semiflow_check(p: &AffineParameterSet, t_terminal: f64, u: &[C], r: f64) -> Result<SemiflowResiduals> {
    if !(0.0..=t_terminal).contains(&r) {
        return Err(Error::PreconditionViolated(format!("r = {r} not in [0, {t_terminal}]")));
    }
    let opts = RiccatiOptions { stops: vec![r], ..Default::default() };
    let direct = solve_backward_with(p, t_terminal, u, 0.0, &opts)?;
    let (phi_r, psi_r) = node_value(&direct, r)?;
    let below: Vec<f64> = direct.breakpoints().into_iter().filter(|s| *s < r).collect();
    let restart = solve_backward_with(p, r, &psi_r, 0.0, &RiccatiOptions { stops: below.clone(), ..Default::default() })?;
    let mut res = SemiflowResiduals { phi: 0.0, psi: 0.0 };
    for s in below.into_iter().chain(std::iter::once(r)) {
        let (pa, sa) = node_value(&direct, s)?;
        let (pb, sb) = node_value(&restart, s)?;
        res.phi = res.phi.max((pa - (phi_r + pb)).norm());
        for (x, y) in sa.iter().zip(&sb) {
            res.psi = res.psi.max((x - y).norm());
        }
    }
    Ok(res)
}

fn node_value(sol: &RiccatiSolution, s: f64) -> Result<(C, Vec<C>)> {
    sol.trajectory
        .at_node(s)
        .map(|v| (v[0], v[1..].to_vec()))
        .ok_or_else(|| Error::PreconditionViolated(format!("no solver node at {s}")))
}

/// `|φ_0|` difference between the solve at the given tolerances and one at tolerances
/// divided by 32.
pub fn error_estimate(p: &AffineParameterSet, t_terminal: f64, u: &[C], opts: &RiccatiOptions) -> Result<f64> {
    let coarse = solve_backward_with(p, t_terminal, u, 0.0, opts)?;
    let mut fine_opts = opts.clone();
    fine_opts.ode.atol /= 32.0;
    fine_opts.ode.rtol /= 32.0;
    let fine = solve_backward_with(p, t_terminal, u, 0.0, &fine_opts)?;
    Ok((coarse.phi(0.0)? - fine.phi(0.0)?).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ajk_lk::{JumpMeasureSpec, StateSpaceShape};
    use ajk_measure::DriverMeasure;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn poisson(lam: f64, horizon: f64) -> AffineParameterSet {
        AffineParameterSet::zero(StateSpaceShape::new(1, 0).unwrap(), DriverMeasure::lebesgue(horizon).unwrap())
            .with_beta(0, 0, lam)
            .with_mu(0, JumpMeasureSpec::point_mass(vec![1.0], lam))
    }

    #[test]
    fn homogeneous_poisson() {
        let (lam, t) = (1.3, 2.0);
        let u = [c(0.0, 0.8)];
        let sol = solve_backward(&poisson(lam, 3.0), t, &u).unwrap();
        let (phi, psi) = sol.at(0.0).unwrap();
        assert!((phi - lam * t * (u[0].exp() - 1.0)).norm() < 1e-9);
        assert_eq!(psi, u.to_vec());
        let cf = char_fn(&sol, 0.0, &[0.0]).unwrap();
        assert!((cf - (lam * t * (u[0].exp() - 1.0)).exp()).norm() < 1e-9);
    }

    #[test]
    fn zero_parameters() {
        let p = AffineParameterSet::zero(StateSpaceShape::new(1, 1).unwrap(), DriverMeasure::lebesgue_with_atoms(2.0, &[(1.0, 1.0)]).unwrap());
        let u = [c(-0.5, 1.0), c(0.0, 2.0)];
        let sol = solve_backward(&p, 2.0, &u).unwrap();
        let (phi, psi) = sol.at(0.3).unwrap();
        assert_eq!(phi, c(0.0, 0.0));
        assert_eq!(psi, u.to_vec());
        let x = [0.7, -1.2];
        let want = (u[0] * x[0] + u[1] * x[1]).exp();
        assert!((char_fn(&sol, 0.3, &x).unwrap() - want).norm() < 1e-15);
        assert!((char_fn(&sol, 2.0, &x).unwrap() - want).norm() < 1e-15);
        assert!(matches!(char_fn(&sol, 2.5, &x), Err(Error::OutOfDomain { .. })));
        let r = semiflow_check(&p, 2.0, &u, 1.0).unwrap();
        assert_eq!((r.phi, r.psi), (0.0, 0.0));
    }

    #[test]
    fn vasicek_against_textbook() {
        // dr = (a + b r) dt + σ dW: ψ = u e^{b(T-s)}, φ = a u (e^{bτ}-1)/b + σ²u²(e^{2bτ}-1)/(4b)
        let (a, b, s2) = (0.05, -0.7, 0.04);
        let p = AffineParameterSet::zero(StateSpaceShape::new(0, 1).unwrap(), DriverMeasure::lebesgue(5.0).unwrap())
            .with_beta(0, 0, a)
            .with_beta(1, 0, b)
            .with_alpha(0, 0, 0, s2);
        let u = [c(0.0, 1.7)];
        let sol = solve_backward(&p, 4.0, &u).unwrap();
        let tau = 4.0;
        let psi = u[0] * (b * tau).exp();
        let phi = a * u[0] * ((b * tau).exp() - 1.0) / b + s2 * u[0] * u[0] * ((2.0 * b * tau).exp() - 1.0) / (4.0 * b);
        let (p0, s0) = sol.at(0.0).unwrap();
        assert!((p0 - phi).norm() < 1e-9 && (s0[0] - psi).norm() < 1e-9);
        assert_eq!(s0[0].re, 0.0);
    }

    #[test]
    fn blowup_is_reported() {
        // R(u) = -u^2 drives ψ to -∞ in finite time when integrated backward
        let p = AffineParameterSet::zero(StateSpaceShape::new(1, 0).unwrap(), DriverMeasure::lebesgue(3.0).unwrap())
            .with_alpha(1, 0, 0, -2.0);
        let r = solve_backward(&p, 3.0, &[c(-1.0, 0.0)]);
        assert!(matches!(r, Err(Error::BlowUp { .. })), "{r:?}");
    }

    #[test]
    fn jump_log_signs() {
        let a = DriverMeasure::lebesgue_with_atoms(2.0, &[(1.0, 1.0)]).unwrap();
        let p = AffineParameterSet::zero(StateSpaceShape::new(0, 1).unwrap(), a).with_gamma(
            1.0,
            ajk_lk::GammaSpec::black_box(|u: &[C]| Ok((u[0] * u[0] * 0.5, vec![u[0] * 0.5]))),
        );
        let u = [c(0.0, 1.0)];
        let sol = solve_backward(&p, 2.0, &u).unwrap();
        assert_eq!(sol.jump_log.len(), 1);
        let j = &sol.jump_log[0];
        assert_eq!(j.dphi, -(u[0] * u[0] * 0.5));
        assert_eq!(j.dpsi, vec![-(u[0] * 0.5)]);
        assert_eq!(sol.left_limit(1.0).unwrap().1, vec![u[0] * 1.5]);
    }
}
