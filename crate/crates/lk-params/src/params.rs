//! Affine parameter sets `(A, γ, β, α, μ)` and the functionals
//!
//! ```text
//! F(t,u)   = <β_0,u> + ½<u,α_0 u> + ∫ (e^{<x,u>} - 1 - <h(x),u>) μ_0(t,dx)
//! R_i(t,u) = same with index i
//! ```
//!
//! and the jump transforms `γ(t_j, u) = (γ_0, γ̄)` at atoms of the driver.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use ajk_measure::{DriverMeasure, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::jumps::JumpMeasureSpec;
use crate::shape::StateSpaceShape;
use crate::timefn::TimeFn;

type C = Complex64;

/// Black-box jump transform `u ↦ (γ_0(u), γ̄(u))`.
pub type GammaFn = Arc<dyn Fn(&[C]) -> Result<(C, Vec<C>)> + Send + Sync>;

/// Lévy–Khintchine triplets `(β̃_i, α̃_i, μ̃_i)`, `i = 0..=d`, of the jump at an atom.
/// Missing trailing indices are zero.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EnhancedJump {
    #[serde(default)]
    pub beta: Vec<Vec<f64>>,
    #[serde(default)]
    pub alpha: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub mu: Vec<JumpMeasureSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outcome {
    pub p: f64,
    pub x: Vec<f64>,
}

/// Jump `X_t = B X_{t-} + ξ` with `ξ` drawn from a finite table; `B` defaults to the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableJump {
    pub outcomes: Vec<Outcome>,
    #[serde(default)]
    pub linear: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum GammaSpec {
    Enhanced(EnhancedJump),
    Table(TableJump),
    #[serde(skip)]
    BlackBox(GammaFn),
}

impl fmt::Debug for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::Enhanced(e) => f.debug_tuple("Enhanced").field(e).finish(),
            GammaSpec::Table(t) => f.debug_tuple("Table").field(t).finish(),
            GammaSpec::BlackBox(_) => f.write_str("BlackBox(..)"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomJump {
    pub t: f64,
    #[serde(flatten)]
    pub gamma: GammaSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct AffineParameterSet {
    pub shape: StateSpaceShape,
    pub driver: DriverMeasure,
    /// `beta[i][k]`: component `k` of `β_i`, `i = 0..=d`.
    pub beta: Vec<Vec<TimeFn>>,
    /// `alpha[i][r][c]`, symmetric in `(r, c)`.
    pub alpha: Vec<Vec<Vec<TimeFn>>>,
    pub mu: Vec<JumpMeasureSpec>,
    /// Sorted by time; atoms without an entry have `γ = 0`.
    pub gamma: Vec<AtomJump>,
}

/// `<β,u> + ½<u,αu> + ∫ (e^{<x,u>} - 1 - <h(x),u>) μ(t,dx)`; `t` only enters through the
/// time scale of `μ`.
pub fn levy_khintchine_exponent(
    shape: &StateSpaceShape,
    beta: &[f64],
    alpha: &[Vec<f64>],
    mu: &JumpMeasureSpec,
    t: f64,
    u: &[C],
) -> Result<C> {
    shape.check_u(u)?;
    lk_unchecked(shape, beta, alpha, mu, t, u)
}

fn lk_unchecked(shape: &StateSpaceShape, beta: &[f64], alpha: &[Vec<f64>], mu: &JumpMeasureSpec, t: f64, u: &[C]) -> Result<C> {
    let mut acc = C::new(0.0, 0.0);
    for (b, uk) in beta.iter().zip(u) {
        acc += uk * *b;
    }
    for (r, row) in alpha.iter().enumerate() {
        for (c, a) in row.iter().enumerate() {
            if *a != 0.0 {
                acc += 0.5 * u[r] * *a * u[c];
            }
        }
    }
    if !mu.is_empty() {
        acc += mu.lk_integral(shape, t, u)?;
    }
    Ok(acc)
}

fn zero_timefns(n: usize) -> Vec<TimeFn> {
    vec![TimeFn::Const(0.0); n]
}

impl EnhancedJump {
    fn triplet(&self, i: usize, d: usize) -> (Vec<f64>, Vec<Vec<f64>>, Option<&JumpMeasureSpec>) {
        (
            self.beta.get(i).cloned().unwrap_or_else(|| vec![0.0; d]),
            self.alpha.get(i).cloned().unwrap_or_default(),
            self.mu.get(i),
        )
    }

    pub fn eval(&self, shape: &StateSpaceShape, u: &[C]) -> Result<(C, Vec<C>)> {
        let d = shape.d();
        let empty = JumpMeasureSpec::empty();
        let mut out = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let (b, a, m) = self.triplet(i, d);
            out.push(lk_unchecked(shape, &b, &a, m.unwrap_or(&empty), 0.0, u)?);
        }
        let g0 = out.remove(0);
        Ok((g0, out))
    }

    /// `(β̃_i, α̃_i, μ̃_i)` with missing entries filled by zeros.
    pub fn triplet_full(&self, i: usize, d: usize) -> (Vec<f64>, Vec<Vec<f64>>, JumpMeasureSpec) {
        let (b, a, m) = self.triplet(i, d);
        let a = if a.is_empty() { vec![vec![0.0; d]; d] } else { a };
        (b, a, m.cloned().unwrap_or_default())
    }

    fn validate(&self, shape: &StateSpaceShape) -> Result<()> {
        let d = shape.d();
        if self.beta.len() > d + 1 || self.beta.iter().any(|b| b.len() != d) {
            return Err(Error::InvalidParameter("enhanced jump beta must be (d+1) vectors of length d".into()));
        }
        if self.alpha.len() > d + 1 || self.alpha.iter().any(|a| a.len() != d || a.iter().any(|r| r.len() != d)) {
            return Err(Error::InvalidParameter("enhanced jump alpha must be (d+1) d×d matrices".into()));
        }
        for a in &self.alpha {
            for r in 0..d {
                for c in 0..r {
                    if a[r][c] != a[c][r] {
                        return Err(Error::InvalidParameter("enhanced jump alpha not symmetric".into()));
                    }
                }
            }
        }
        if self.mu.len() > d + 1 {
            return Err(Error::InvalidParameter("enhanced jump mu has more than d+1 entries".into()));
        }
        self.mu.iter().try_for_each(|m| m.validate(shape))
    }
}

impl TableJump {
    pub fn matrix(&self, d: usize) -> Vec<Vec<f64>> {
        self.linear
            .clone()
            .unwrap_or_else(|| (0..d).map(|r| (0..d).map(|c| if r == c { 1.0 } else { 0.0 }).collect()).collect())
    }

    pub fn eval(&self, d: usize, u: &[C]) -> Result<(C, Vec<C>)> {
        let mut s = C::new(0.0, 0.0);
        for o in &self.outcomes {
            let dot: C = o.x.iter().zip(u).map(|(x, uk)| uk * *x).sum();
            s += o.p * dot.exp();
        }
        let b = self.matrix(d);
        let gbar = (0..d)
            .map(|k| (0..d).map(|r| u[r] * b[r][k]).sum::<C>() - u[k])
            .collect();
        Ok((s.ln(), gbar))
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.outcomes.is_empty() {
            return Err(Error::InvalidProbability("table jump has no outcomes".into()));
        }
        let mut total = 0.0;
        for o in &self.outcomes {
            if !(o.p >= 0.0 && o.p <= 1.0) {
                return Err(Error::InvalidProbability(format!("outcome probability {} not in [0,1]", o.p)));
            }
            if o.x.len() != d {
                return Err(Error::InvalidParameter("table outcome dimension mismatch".into()));
            }
            total += o.p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbability(format!("outcome probabilities sum to {total}")));
        }
        if let Some(b) = &self.linear {
            if b.len() != d || b.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidParameter("table linear map must be d×d".into()));
            }
        }
        Ok(())
    }
}

impl GammaSpec {
    pub fn eval(&self, shape: &StateSpaceShape, u: &[C]) -> Result<(C, Vec<C>)> {
        match self {
            GammaSpec::Enhanced(e) => e.eval(shape, u),
            GammaSpec::Table(t) => t.eval(shape.d(), u),
            GammaSpec::BlackBox(f) => f(u),
        }
    }

    pub fn black_box<F>(f: F) -> Self
    where
        F: Fn(&[C]) -> Result<(C, Vec<C>)> + Send + Sync + 'static,
    {
        GammaSpec::BlackBox(Arc::new(f))
    }
}

impl AffineParameterSet {
    /// All-zero parameters on the given driver.
    pub fn zero(shape: StateSpaceShape, driver: DriverMeasure) -> Self {
        let d = shape.d();
        AffineParameterSet {
            shape,
            driver,
            beta: vec![zero_timefns(d); d + 1],
            alpha: vec![vec![zero_timefns(d); d]; d + 1],
            mu: vec![JumpMeasureSpec::empty(); d + 1],
            gamma: Vec::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.shape.d()
    }

    /// Sets component `k` (0-based) of `β_i`.
    pub fn with_beta(mut self, i: usize, k: usize, f: impl Into<TimeFn>) -> Self {
        self.beta[i][k] = f.into();
        self
    }

    /// Sets entries `(r, c)` and `(c, r)` of `α_i`.
    pub fn with_alpha(mut self, i: usize, r: usize, c: usize, f: impl Into<TimeFn>) -> Self {
        let f = f.into();
        self.alpha[i][r][c] = f.clone();
        self.alpha[i][c][r] = f;
        self
    }

    pub fn with_mu(mut self, i: usize, mu: JumpMeasureSpec) -> Self {
        self.mu[i] = mu;
        self
    }

    /// Attaches `γ` at the atom `t`, replacing any previous entry.
    pub fn with_gamma(mut self, t: f64, gamma: GammaSpec) -> Self {
        self.gamma.retain(|g| g.t != t);
        self.gamma.push(AtomJump { t, gamma });
        self.gamma.sort_by(|a, b| a.t.total_cmp(&b.t));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        if self.beta.len() != d + 1 || self.beta.iter().any(|b| b.len() != d) {
            return Err(Error::InvalidParameter(format!("beta must be {} vectors of length {d}", d + 1)));
        }
        if self.alpha.len() != d + 1 || self.alpha.iter().any(|a| a.len() != d || a.iter().any(|r| r.len() != d)) {
            return Err(Error::InvalidParameter(format!("alpha must be {} matrices of size {d}×{d}", d + 1)));
        }
        for (i, a) in self.alpha.iter().enumerate() {
            for r in 0..d {
                for c in 0..r {
                    if a[r][c] != a[c][r] {
                        return Err(Error::InvalidParameter(format!("alpha_{i} is not symmetric at ({r},{c})")));
                    }
                }
            }
        }
        if self.mu.len() != d + 1 {
            return Err(Error::InvalidParameter(format!("mu must have {} entries", d + 1)));
        }
        self.mu.iter().try_for_each(|m| m.validate(&self.shape))?;
        for w in self.gamma.windows(2) {
            if w[0].t >= w[1].t {
                return Err(Error::InvalidParameter("gamma entries must have increasing, distinct times".into()));
            }
        }
        for g in &self.gamma {
            if self.driver.atom_at(g.t).is_none() {
                return Err(Error::NotAnAtom { t: g.t });
            }
            match &g.gamma {
                GammaSpec::Enhanced(e) => e.validate(&self.shape)?,
                GammaSpec::Table(tb) => tb.validate(d)?,
                GammaSpec::BlackBox(_) => {}
            }
        }
        Ok(())
    }

    pub fn beta_at(&self, i: usize, t: f64) -> Vec<f64> {
        self.beta[i].iter().map(|f| f.eval(t)).collect()
    }

    pub fn alpha_at(&self, i: usize, t: f64) -> Vec<Vec<f64>> {
        self.alpha[i].iter().map(|r| r.iter().map(|f| f.eval(t)).collect()).collect()
    }

    fn index_eval(&self, i: usize, t: f64, u: &[C]) -> Result<C> {
        lk_unchecked(&self.shape, &self.beta_at(i, t), &self.alpha_at(i, t), &self.mu[i], t, u)
    }

    pub fn f_eval(&self, t: f64, u: &[C]) -> Result<C> {
        self.shape.check_u(u)?;
        self.index_eval(0, t, u)
    }

    pub fn r_eval(&self, t: f64, u: &[C]) -> Result<Vec<C>> {
        self.shape.check_u(u)?;
        (1..=self.d()).map(|i| self.index_eval(i, t, u)).collect()
    }

    /// `(F(t,u), R(t,u))` without the `u ∈ U` check, for use inside integrators.
    pub fn fr_unchecked(&self, t: f64, u: &[C]) -> Result<(C, Vec<C>)> {
        let f = self.index_eval(0, t, u)?;
        let r = (1..=self.d()).map(|i| self.index_eval(i, t, u)).collect::<Result<Vec<_>>>()?;
        Ok((f, r))
    }

    pub fn gamma_spec(&self, t: f64) -> Option<&GammaSpec> {
        self.gamma.iter().find(|g| g.t == t).map(|g| &g.gamma)
    }

    /// `(γ_0(t,u), γ̄(t,u))` at an atom `t` of the driver.
    pub fn gamma_eval(&self, t: f64, u: &[C]) -> Result<(C, Vec<C>)> {
        self.shape.check_u(u)?;
        self.gamma_unchecked(t, u)
    }

    pub fn gamma_unchecked(&self, t: f64, u: &[C]) -> Result<(C, Vec<C>)> {
        if self.driver.atom_at(t).is_none() {
            return Err(Error::NotAnAtom { t });
        }
        match self.gamma_spec(t) {
            Some(g) => g.eval(&self.shape, u),
            None => Ok((C::new(0.0, 0.0), vec![C::new(0.0, 0.0); self.d()])),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ModelFile = serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("model file: {e}")))?;
        raw.try_into()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }

    /// JSON model file; fails if some `γ` is a black box.
    pub fn to_json(&self) -> Result<String> {
        if self.gamma.iter().any(|g| matches!(g.gamma, GammaSpec::BlackBox(_))) {
            return Err(Error::InvalidParameter("black-box gamma cannot be serialised".into()));
        }
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

#[derive(Deserialize)]
struct ModelFile {
    shape: StateSpaceShape,
    driver: DriverMeasure,
    #[serde(default)]
    beta: Vec<Vec<TimeFn>>,
    #[serde(default)]
    alpha: Vec<Vec<Vec<TimeFn>>>,
    #[serde(default)]
    mu: Vec<JumpMeasureSpec>,
    #[serde(default)]
    gamma: Vec<AtomJump>,
}

impl TryFrom<ModelFile> for AffineParameterSet {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let shape = StateSpaceShape::new(f.shape.m, f.shape.n)?;
        let mut p = AffineParameterSet::zero(shape, f.driver);
        if !f.beta.is_empty() {
            p.beta = f.beta;
        }
        if !f.alpha.is_empty() {
            p.alpha = f.alpha;
        }
        if !f.mu.is_empty() {
            p.mu = f.mu;
        }
        let mut gamma = f.gamma;
        gamma.sort_by(|a, b| a.t.total_cmp(&b.t));
        p.gamma = gamma;
        p.validate()?;
        Ok(p)
    }
}
