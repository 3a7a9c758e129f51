//! Admissibility of parameter sets on `D = R_{>=0}^m × R^n`.
//!
//! Continuous-part conditions are checked on a time grid covering every segment of the
//! driver with positive density; atom conditions are checked on the jump triplets
//! `(β̃, α̃, μ̃)` themselves, so the answer does not depend on `ΔA`.
//!
//! On the nonnegative coordinates the truncation also cuts small positive jumps, so the
//! constant drift condition is read as `β_0^I - H_{I0} >= 0` (the drift net of the
//! compensator). It reduces to `β_0 ∈ D` when `μ_0 = 0`.

use std::fmt;

use ajk_measure::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::jumps::JumpMeasureSpec;
use crate::params::{AffineParameterSet, EnhancedJump, GammaSpec, TableJump};
use crate::shape::StateSpaceShape;

const TOL: f64 = 1e-12;
const GRID: usize = 32;

pub mod clause {
    pub const ALPHA_PSD: &str = "(i) alpha_i positive semidefinite";
    pub const ALPHA0_II: &str = "(i) alpha_0;II = 0";
    pub const ALPHA_I_OFF: &str = "(i) alpha_i;I\\i,I\\i = 0 for i in I";
    pub const ALPHA_J: &str = "(i) alpha_j = 0 for j in J";
    pub const BETA0_D: &str = "(i) beta_0 in D";
    pub const BETA_IJ: &str = "(i) beta_IJ = 0";
    pub const BETA_I_OFF: &str = "(i) beta_i(I\\i) - H_i(I\\i) >= 0";
    pub const MU_SUPPORT: &str = "(i) mu_i supported on D";
    pub const MU_J: &str = "(i) mu_j = 0 for j in J";
    pub const M_FINITE: &str = "(i) M_i finite";
    pub const ATOM_ALPHA_PSD: &str = "(ii') alpha_i positive semidefinite";
    pub const ATOM_ALPHA_II: &str = "(ii') alpha_i;II = 0 for i in I and 0";
    pub const ATOM_ALPHA_J: &str = "(ii') alpha_j = 0 for j in J";
    pub const ATOM_BETA0_D: &str = "(ii') beta_0 in D";
    pub const ATOM_BETA_IJ: &str = "(ii') beta_IJ = 0";
    pub const ATOM_BETA_II: &str = "(ii') beta_II - H_II + id >= 0";
    pub const ATOM_MU_SUPPORT: &str = "(ii') mu_i supported on D";
    pub const ATOM_MU_J: &str = "(ii') mu_j = 0 for j in J";
    pub const ATOM_MU_INT: &str = "(ii') mu_i integrability";
    pub const ATOM_TABLE: &str = "(ii) table jump maps D into D";
    pub const ATOM_GAMMA_ZERO: &str = "(ii) gamma(t,0) = 0";
    pub const ATOM_FOURIER: &str = "(ii) Fourier-Laplace transform of a D-valued law";
    pub const INTEGRABLE: &str = "local integrability of alpha, beta, M against A";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Unverified,
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub clause: &'static str,
    pub status: Status,
    pub index: Option<usize>,
    pub time: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AdmissibilityReport {
    pub findings: Vec<Finding>,
}

impl AdmissibilityReport {
    /// No clause failed; unverified clauses do not count as failures.
    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.status == Status::Fail)
    }

    pub fn unverified(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.status == Status::Unverified)
    }

    pub fn failed(&self, clause: &str) -> bool {
        self.failures().any(|f| f.clause == clause)
    }

    fn record(&mut self, clause: &'static str, status: Status, index: Option<usize>, time: Option<f64>, detail: String) {
        // keep only the first offender per clause
        if let Some(f) = self.findings.iter_mut().find(|f| f.clause == clause) {
            if f.status == Status::Pass && status != Status::Pass {
                *f = Finding { clause, status, index, time, detail };
            }
            return;
        }
        self.findings.push(Finding { clause, status, index, time, detail });
    }

    fn pass(&mut self, clause: &'static str) {
        self.record(clause, Status::Pass, None, None, String::new());
    }

    fn fail(&mut self, clause: &'static str, index: Option<usize>, time: Option<f64>, detail: String) {
        self.record(clause, Status::Fail, index, time, detail);
    }

    fn check(&mut self, clause: &'static str, ok: bool, index: Option<usize>, time: Option<f64>, detail: impl FnOnce() -> String) {
        if ok {
            self.pass(clause);
        } else {
            self.fail(clause, index, time, detail());
        }
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.findings {
            let tag = match x.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Unverified => "unverified",
            };
            write!(f, "{tag:10} {}", x.clause)?;
            if let Some(i) = x.index {
                write!(f, " [index {i}]")?;
            }
            if let Some(t) = x.time {
                write!(f, " [t = {t}]")?;
            }
            if !x.detail.is_empty() {
                write!(f, ": {}", x.detail)?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", if self.passed() { "admissible" } else { "not admissible" })
    }
}

fn min_eigenvalue(a: &[Vec<f64>]) -> f64 {
    let d = a.len();
    if d == 0 {
        return 0.0;
    }
    DMatrix::from_fn(d, d, |i, j| a[i][j]).symmetric_eigenvalues().min()
}

fn scale_of(a: &[Vec<f64>]) -> f64 {
    1.0 + a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Time grid on segments of positive density, including right limits at parameter breaks.
fn sample_times(p: &AffineParameterSet) -> Vec<f64> {
    let mut breaks: Vec<f64> = Vec::new();
    let fns = p.beta.iter().flatten().chain(p.alpha.iter().flatten().flatten()).chain(p.mu.iter().map(|m| &m.scale));
    for f in fns {
        breaks.extend_from_slice(f.breaks());
    }
    let mut ts = Vec::new();
    for seg in p.driver.segments() {
        if seg.density.is_zero() {
            continue;
        }
        for k in 0..=GRID {
            ts.push(seg.t0 + (seg.t1 - seg.t0) * k as f64 / GRID as f64);
        }
        ts.extend(breaks.iter().copied().filter(|b| *b >= seg.t0 && *b < seg.t1));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// `H_{ki} = ∫ h_k dμ_i` and `∫ h_k^2 dμ_i` for all `k`.
fn h_columns(shape: &StateSpaceShape, mu: &JumpMeasureSpec, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = shape.d();
    let mut h1 = vec![0.0; d];
    let mut h2 = vec![0.0; d];
    if mu.is_empty() {
        return Ok((h1, h2));
    }
    for k in 0..d {
        let (a, b) = mu.h_moments(shape, t, k)?;
        h1[k] = a;
        h2[k] = b;
    }
    Ok((h1, h2))
}

fn script_m(shape: &StateSpaceShape, i: usize, h1: &[f64], h2: &[f64]) -> f64 {
    let mut m = 0.0;
    for k in shape.positive() {
        if k + 1 == i {
            m += h2[k];
        } else {
            m += h1[k];
        }
    }
    for k in shape.real() {
        m += h2[k];
    }
    m
}

fn h_or_fail(r: &mut AdmissibilityReport, shape: &StateSpaceShape, mu: &JumpMeasureSpec, t: f64, i: usize, clause: &'static str) -> (Vec<f64>, Vec<f64>) {
    match h_columns(shape, mu, t) {
        Ok(v) => v,
        Err(e) => {
            r.fail(clause, Some(i), Some(t), format!("jump integrals failed: {e}"));
            (vec![f64::INFINITY; shape.d()], vec![f64::INFINITY; shape.d()])
        }
    }
}

fn check_continuous(p: &AffineParameterSet, r: &mut AdmissibilityReport) {
    use clause::*;
    let shape = &p.shape;
    let (d, m) = (shape.d(), shape.m);
    for c in [ALPHA_PSD, ALPHA0_II, ALPHA_I_OFF, ALPHA_J, BETA0_D, BETA_IJ, BETA_I_OFF, MU_SUPPORT, MU_J, M_FINITE] {
        r.pass(c);
    }
    for (i, mu) in p.mu.iter().enumerate() {
        if let Some(c) = mu.components.iter().find(|c| !c.supported_on_d(shape)) {
            r.fail(MU_SUPPORT, Some(i), None, format!("component {c:?} charges the complement of D"));
        }
    }
    for t in sample_times(p) {
        let alpha: Vec<_> = (0..=d).map(|i| p.alpha_at(i, t)).collect();
        let beta: Vec<_> = (0..=d).map(|i| p.beta_at(i, t)).collect();
        let mut hs = Vec::with_capacity(d + 1);
        for i in 0..=d {
            hs.push(h_or_fail(r, shape, &p.mu[i], t, i, M_FINITE));
        }
        for (i, a) in alpha.iter().enumerate() {
            let ev = min_eigenvalue(a);
            r.check(ALPHA_PSD, ev >= -TOL * scale_of(a), Some(i), Some(t), || format!("smallest eigenvalue {ev:e}"));
        }
        for q in 0..m {
            for s in 0..m {
                let v = alpha[0][q][s];
                r.check(ALPHA0_II, v.abs() <= TOL, Some(0), Some(t), || format!("entry ({},{}) = {v}", q + 1, s + 1));
            }
        }
        for i in 1..=m {
            for q in (0..m).filter(|q| q + 1 != i) {
                for s in (0..m).filter(|s| s + 1 != i) {
                    let v = alpha[i][q][s];
                    r.check(ALPHA_I_OFF, v.abs() <= TOL, Some(i), Some(t), || format!("entry ({},{}) = {v}", q + 1, s + 1));
                }
            }
        }
        for j in m + 1..=d {
            let nz = alpha[j].iter().flatten().any(|v| v.abs() > TOL);
            r.check(ALPHA_J, !nz, Some(j), Some(t), || "state-dependent diffusion on a real coordinate".into());
            let mu_zero = p.mu[j].is_empty() || p.mu[j].scale.eval(t) == 0.0;
            r.check(MU_J, mu_zero, Some(j), Some(t), || "jump measure on a real coordinate index".into());
        }
        for k in 0..m {
            let net = beta[0][k] - hs[0].0[k];
            r.check(BETA0_D, net >= -TOL, Some(0), Some(t), || format!("component {} net of compensator is {net}", k + 1));
        }
        for j in m + 1..=d {
            for k in 0..m {
                let v = beta[j][k];
                r.check(BETA_IJ, v.abs() <= TOL, Some(j), Some(t), || format!("component {} of beta_{j} is {v}", k + 1));
            }
        }
        for i in 1..=m {
            for k in (1..=m).filter(|k| *k != i) {
                // component i of β_k against ∫ h_i dμ_k
                let net = beta[k][i - 1] - hs[k].0[i - 1];
                r.check(BETA_I_OFF, net >= -TOL, Some(i), Some(t), || format!("entry ({i},{k}) is {net}"));
            }
        }
        for i in (0..=m).filter(|i| !p.mu[*i].is_empty()) {
            let mm = script_m(shape, i, &hs[i].0, &hs[i].1);
            r.check(M_FINITE, mm.is_finite(), Some(i), Some(t), || format!("M = {mm}"));
        }
    }
}

fn check_enhanced(shape: &StateSpaceShape, t: f64, e: &EnhancedJump, r: &mut AdmissibilityReport) {
    use clause::*;
    let (d, m) = (shape.d(), shape.m);
    let trip: Vec<_> = (0..=d).map(|i| e.triplet_full(i, d)).collect();
    let mut hs = Vec::with_capacity(d + 1);
    for (i, tr) in trip.iter().enumerate() {
        hs.push(h_or_fail(r, shape, &tr.2, 0.0, i, ATOM_MU_INT));
    }
    for (i, (beta, alpha, mu)) in trip.iter().enumerate() {
        let ev = min_eigenvalue(alpha);
        r.check(ATOM_ALPHA_PSD, ev >= -TOL * scale_of(alpha), Some(i), Some(t), || format!("smallest eigenvalue {ev:e}"));
        if i <= m {
            let nz = (0..m).any(|q| (0..m).any(|s| alpha[q][s].abs() > TOL));
            r.check(ATOM_ALPHA_II, !nz, Some(i), Some(t), || "diffusive part on the nonnegative block".into());
            if !mu.is_empty() {
                let integ: f64 = shape.positive().map(|k| hs[i].0[k]).sum::<f64>() + shape.real().map(|k| hs[i].1[k]).sum::<f64>();
                r.check(ATOM_MU_INT, integ.is_finite(), Some(i), Some(t), || format!("integral {integ}"));
            }
        } else {
            let nz = alpha.iter().flatten().any(|v| v.abs() > TOL);
            r.check(ATOM_ALPHA_J, !nz, Some(i), Some(t), || "state-dependent diffusion on a real coordinate".into());
            r.check(ATOM_MU_J, mu.is_empty(), Some(i), Some(t), || "jump measure on a real coordinate index".into());
            for k in 0..m {
                let v = beta[k];
                r.check(ATOM_BETA_IJ, v.abs() <= TOL, Some(i), Some(t), || format!("component {} of beta_{i} is {v}", k + 1));
            }
        }
        if let Some(c) = mu.components.iter().find(|c| !c.supported_on_d(shape)) {
            r.fail(ATOM_MU_SUPPORT, Some(i), Some(t), format!("component {c:?} charges the complement of D"));
        }
    }
    for k in 0..m {
        let net = trip[0].0[k] - hs[0].0[k];
        r.check(ATOM_BETA0_D, net >= -TOL, Some(0), Some(t), || format!("component {} net of compensator is {net}", k + 1));
    }
    for i in 1..=m {
        for k in 1..=m {
            let id = if i == k { 1.0 } else { 0.0 };
            let net = trip[k].0[i - 1] - hs[k].0[i - 1] + id;
            r.check(ATOM_BETA_II, net >= -TOL, Some(i), Some(t), || format!("entry ({i},{k}) is {net}"));
        }
    }
}

fn check_table(shape: &StateSpaceShape, t: f64, tb: &TableJump, r: &mut AdmissibilityReport) {
    let (d, m) = (shape.d(), shape.m);
    let b = tb.matrix(d);
    let mut ok = true;
    let mut why = String::new();
    if let Some(o) = tb.outcomes.iter().find(|o| o.p > 0.0 && !shape.contains_state(&o.x)) {
        ok = false;
        why = format!("outcome {:?} lies outside D", o.x);
    }
    for i in 0..m {
        for k in 0..d {
            let bad = if k < m { b[i][k] < -TOL } else { b[i][k].abs() > TOL };
            if bad && ok {
                ok = false;
                why = format!("linear map entry ({},{}) = {} does not preserve D", i + 1, k + 1, b[i][k]);
            }
        }
    }
    r.check(clause::ATOM_TABLE, ok, None, Some(t), || why);
}

fn check_atoms(p: &AffineParameterSet, r: &mut AdmissibilityReport) {
    use clause::*;
    let d = p.d();
    let zero = vec![Complex64::new(0.0, 0.0); d];
    for g in &p.gamma {
        match p.gamma_unchecked(g.t, &zero) {
            Ok((g0, gb)) => {
                let worst = gb.iter().fold(g0.norm(), |acc, v| acc.max(v.norm()));
                r.check(ATOM_GAMMA_ZERO, worst <= 1e-14, None, Some(g.t), || format!("|gamma(t,0)| = {worst:e}"));
            }
            Err(e) => r.fail(ATOM_GAMMA_ZERO, None, Some(g.t), format!("evaluation failed: {e}")),
        }
        match &g.gamma {
            GammaSpec::Enhanced(e) => check_enhanced(&p.shape, g.t, e, r),
            GammaSpec::Table(tb) => check_table(&p.shape, g.t, tb, r),
            GammaSpec::BlackBox(_) => r.record(
                ATOM_FOURIER,
                Status::Unverified,
                None,
                Some(g.t),
                "unverified Fourier-positivity: black-box jump transform".into(),
            ),
        }
    }
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn norm2(b: &[f64]) -> f64 {
    b.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_integrable(p: &AffineParameterSet, r: &mut AdmissibilityReport) {
    let shape = &p.shape;
    let d = shape.d();
    let mut err = None;
    let g = |t: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..=d {
            s += frobenius(&p.alpha_at(i, t)) + norm2(&p.beta_at(i, t));
            if i <= shape.m && !p.mu[i].is_empty() {
                match h_columns(shape, &p.mu[i], t) {
                    Ok((h1, h2)) => s += script_m(shape, i, &h1, &h2),
                    Err(_) => s = f64::INFINITY,
                }
            }
        }
        s
    };
    let cont: std::result::Result<f64, _> = p.driver.integrate_continuous(g, 0.0, p.driver.horizon());
    let mut total = match cont {
        Ok(v) => v,
        Err(e) => {
            err = Some(e.to_string());
            f64::INFINITY
        }
    };
    for gj in &p.gamma {
        if let GammaSpec::Enhanced(e) = &gj.gamma {
            for i in 0..=d {
                let (b, a, mu) = e.triplet_full(i, d);
                total += frobenius(&a) + norm2(&b);
                if i <= shape.m && !mu.is_empty() {
                    match h_columns(shape, &mu, 0.0) {
                        Ok((h1, h2)) => total += script_m(shape, i, &h1, &h2),
                        Err(e) => err = Some(e.to_string()),
                    }
                }
            }
        }
    }
    let ok = total.is_finite() && err.is_none();
    r.check(clause::INTEGRABLE, ok, None, None, || err.unwrap_or_else(|| format!("integral over [0, horizon] is {total}")));
}

/// Runs every admissibility clause; failures are report entries, never errors.
pub fn check_admissible(p: &AffineParameterSet) -> AdmissibilityReport {
    let mut r = AdmissibilityReport::default();
    check_continuous(p, &mut r);
    check_atoms(p, &mut r);
    check_integrable(p, &mut r);
    r
}

/// `C(t)` with `Re R_i(t,u) <= C(t) ((Re u_i)^2 - Re u_i)` for `i ∈ I` (1-based) and
/// `u ∈ U`, valid for admissible parameters.
pub fn growth_constant(p: &AffineParameterSet, t: f64, i: usize) -> Result<f64> {
    let k = i - 1;
    let (_, h2) = p.mu[i].h_moments(&p.shape, t, k)?;
    let quad = 0.5 * p.alpha[i][k][k].eval(t) + 0.5 * h2;
    Ok(quad.max(p.beta[i][k].eval(t).abs()))
}

#[cfg(test)]
mod tests {
    use super::clause::*;
    use super::*;
    use crate::params::{Outcome, TableJump};
    use ajk_measure::DriverMeasure;

    fn base(m: usize, n: usize) -> AffineParameterSet {
        AffineParameterSet::zero(StateSpaceShape::new(m, n).unwrap(), DriverMeasure::lebesgue_with_atoms(2.0, &[(1.0, 1.0)]).unwrap())
    }

    #[test]
    fn zero_parameters_pass() {
        let r = check_admissible(&base(1, 1));
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn real_coordinate_diffusion_fails() {
        let r = check_admissible(&base(0, 1).with_alpha(1, 0, 0, 0.5));
        assert!(r.failed(ALPHA_J), "{r}");
    }

    #[test]
    fn cir_passes() {
        let p = base(1, 0).with_beta(0, 0, 0.1).with_beta(1, 0, -0.7).with_alpha(1, 0, 0, 0.09);
        assert!(check_admissible(&p).passed());
    }

    #[test]
    fn table_jump_leaving_d_fails() {
        let p = base(1, 0).with_gamma(
            1.0,
            GammaSpec::Table(TableJump { outcomes: vec![Outcome { p: 1.0, x: vec![-0.5] }], linear: None }),
        );
        let r = check_admissible(&p);
        assert!(r.failed(ATOM_TABLE), "{r}");
    }

    #[test]
    fn black_box_is_unverified() {
        let p = base(0, 1).with_gamma(1.0, GammaSpec::black_box(|u| Ok((u[0] * u[0] * 0.5, vec![u[0] * 0.0]))));
        let r = check_admissible(&p);
        assert!(r.passed());
        assert_eq!(r.unverified().count(), 1);
        assert!(r.to_string().contains("unverified Fourier-positivity"));
    }

    #[test]
    fn growth_bound_for_cir_with_jumps() {
        let p = base(1, 0)
            .with_beta(1, 0, -0.7)
            .with_alpha(1, 0, 0, 0.3)
            .with_mu(1, JumpMeasureSpec::point_mass(vec![0.5], 2.0))
            .with_beta(1, 0, 0.3);
        assert!(check_admissible(&p).passed());
        let c = growth_constant(&p, 0.5, 1).unwrap();
        for (x, y) in [(-0.1, 3.0), (-2.0, 0.0), (0.0, 5.0), (-7.0, -1.0)] {
            let u = [Complex64::new(x, y)];
            let re = p.r_eval(0.5, &u).unwrap()[0].re;
            assert!(re <= c * (x * x - x) + 1e-12, "{re} > {}", c * (x * x - x));
        }
    }
}
