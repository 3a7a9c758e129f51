//! Jump measures on `D \ {0}` built from a finite list of components, and the integrals
//! against them needed by the Lévy–Khintchine functionals and the admissibility checks.
//!
//! The truncation function is `h_k(x) = x_k 1{|x_k| <= 1}` componentwise, boundary included.

use std::fmt;
use std::sync::Arc;

use ajk_measure::quadrature::integrate_tol;
use ajk_measure::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::shape::StateSpaceShape;

const QUAD_ABS: f64 = 1e-14;
const QUAD_REL: f64 = 1e-12;
/// Half-width, in standard deviations, of the box used for restricted Gaussians.
const GAUSS_BOX: f64 = 12.0;

pub fn trunc(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        x
    } else {
        0.0
    }
}

/// Density with respect to Lebesgue measure on an axis-aligned box.
#[derive(Clone)]
pub struct NumericDensity {
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl fmt::Debug for NumericDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericDensity").field("lo", &self.lo).field("hi", &self.hi).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpComponent {
    PointMass {
        x: Vec<f64>,
        weight: f64,
    },
    /// `weight * N(mean, cov)`, optionally restricted (not renormalised) to `D`.
    Gaussian {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
        weight: f64,
        #[serde(default)]
        restricted: bool,
    },
    /// `weight * rate e^{-rate ξ} dξ` along the 1-based nonnegative axis `axis`.
    Exponential {
        rate: f64,
        axis: usize,
        weight: f64,
    },
    #[serde(skip)]
    Numeric { density: NumericDensity, weight: f64 },
}

fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `P(-1 <= X <= 1)`, `E[X 1{|X|<=1}]`, `E[X^2 1{|X|<=1}]` for `X ~ N(m, s^2)`.
fn truncated_normal_moments(m: f64, s: f64) -> (f64, f64, f64) {
    if s == 0.0 {
        return if m.abs() <= 1.0 { (1.0, m, m * m) } else { (0.0, 0.0, 0.0) };
    }
    let (a, b) = ((-1.0 - m) / s, (1.0 - m) / s);
    // difference of tails is more accurate than difference of CDFs when both are large
    let p = if a > 0.0 { norm_cdf(-a) - norm_cdf(-b) } else { norm_cdf(b) - norm_cdf(a) };
    let (pa, pb) = (norm_pdf(a), norm_pdf(b));
    let e1 = m * p + s * (pa - pb);
    let e2 = m * m * p + 2.0 * m * s * (pa - pb) + s * s * (p + a * pa - b * pb);
    (p, e1, e2)
}

/// `∫_0^1 ξ λe^{-λξ} dξ` and `∫_0^1 ξ^2 λe^{-λξ} dξ`.
fn exponential_moments(rate: f64) -> (f64, f64) {
    let l = rate;
    let e = (-l).exp();
    ((1.0 - e * (1.0 + l)) / l, (2.0 - e * (l * l + 2.0 * l + 2.0)) / (l * l))
}

/// Nested adaptive quadrature over a box, split where the truncation has kinks.
fn box_integrate<V, F>(f: &F, lo: &[f64], hi: &[f64]) -> Result<V>
where
    V: ajk_measure::VectorSpace,
    F: Fn(&[f64]) -> V,
{
    fn rec<V, F>(f: &F, lo: &[f64], hi: &[f64], prefix: &[f64]) -> Result<V>
    where
        V: ajk_measure::VectorSpace,
        F: Fn(&[f64]) -> V,
    {
        let k = prefix.len();
        let mut cuts = vec![lo[k]];
        cuts.extend([-1.0, 0.0, 1.0].into_iter().filter(|c| *c > lo[k] && *c < hi[k]));
        cuts.push(hi[k]);
        let mut total: Option<V> = None;
        for w in cuts.windows(2) {
            let mut err = None;
            let piece = integrate_tol(
                |s| {
                    let mut x = prefix.to_vec();
                    x.push(s);
                    if k + 1 == lo.len() {
                        f(&x)
                    } else {
                        match rec(f, lo, hi, &x) {
                            Ok(v) => v,
                            Err(e) => {
                                err = Some(e);
                                f(&x).zeros_like()
                            }
                        }
                    }
                },
                w[0],
                w[1],
                QUAD_ABS,
                QUAD_REL,
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            match &mut total {
                None => total = Some(piece),
                Some(t) => t.axpy(1.0, &piece),
            }
        }
        Ok(total.expect("at least one piece"))
    }
    rec(f, lo, hi, &[])
}

fn gaussian_as_numeric(mean: &[f64], cov: &[Vec<f64>], shape: &StateSpaceShape) -> Result<NumericDensity> {
    let d = mean.len();
    let sigma = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("restricted Gaussian needs a positive definite covariance".into()))?;
    let det: f64 = chol.l().diagonal().iter().map(|v| v * v).product();
    let inv = chol.inverse();
    let norm = ((2.0 * std::f64::consts::PI).powi(d as i32) * det).sqrt().recip();
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for k in 0..d {
        let s = sigma[(k, k)].sqrt();
        let l = mean[k] - GAUSS_BOX * s;
        lo.push(if k < shape.m { l.max(0.0) } else { l });
        hi.push(mean[k] + GAUSS_BOX * s);
    }
    let mu = DVector::from_column_slice(mean);
    Ok(NumericDensity {
        f: Arc::new(move |x: &[f64]| {
            let z = DVector::from_column_slice(x) - &mu;
            norm * (-0.5 * (z.transpose() * &inv * &z)[(0, 0)]).exp()
        }),
        lo,
        hi,
    })
}

impl JumpComponent {
    pub fn dim(&self) -> usize {
        match self {
            JumpComponent::PointMass { x, .. } => x.len(),
            JumpComponent::Gaussian { mean, .. } => mean.len(),
            JumpComponent::Exponential { .. } => 0,
            JumpComponent::Numeric { density, .. } => density.lo.len(),
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            JumpComponent::PointMass { weight, .. }
            | JumpComponent::Gaussian { weight, .. }
            | JumpComponent::Exponential { weight, .. }
            | JumpComponent::Numeric { weight, .. } => *weight,
        }
    }

    /// Structural validity: dimensions, positive weights and rates, symmetric PSD covariance.
    pub fn validate(&self, shape: &StateSpaceShape) -> Result<()> {
        let d = shape.d();
        let w = self.weight();
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("jump component weight {w} must be positive")));
        }
        match self {
            JumpComponent::PointMass { x, .. } => {
                if x.len() != d {
                    return Err(Error::InvalidParameter(format!("point mass location has {} components, expected {d}", x.len())));
                }
                if x.iter().all(|v| *v == 0.0) {
                    return Err(Error::InvalidParameter("point mass at the origin".into()));
                }
            }
            JumpComponent::Gaussian { mean, cov, .. } => {
                if mean.len() != d || cov.len() != d || cov.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidParameter("Gaussian mean/covariance dimension mismatch".into()));
                }
                let s = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
                if (&s - s.transpose()).amax() > 1e-12 * (1.0 + s.amax()) {
                    return Err(Error::InvalidParameter("Gaussian covariance not symmetric".into()));
                }
                if s.symmetric_eigenvalues().min() < -1e-12 * (1.0 + s.amax()) {
                    return Err(Error::InvalidParameter("Gaussian covariance not positive semidefinite".into()));
                }
            }
            JumpComponent::Exponential { rate, axis, .. } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidRate(format!("exponential rate {rate} must be positive")));
                }
                if *axis == 0 || *axis > shape.m {
                    return Err(Error::InvalidParameter(format!("exponential axis {axis} not in 1..={}", shape.m)));
                }
            }
            JumpComponent::Numeric { density, .. } => {
                if density.lo.len() != d || density.hi.len() != d || density.lo.iter().zip(&density.hi).any(|(l, h)| !(l < h)) {
                    return Err(Error::InvalidParameter("numeric density box is malformed".into()));
                }
            }
        }
        Ok(())
    }

    /// Whether the component lives on `D \ {0}`.
    pub fn supported_on_d(&self, shape: &StateSpaceShape) -> bool {
        let m = shape.m;
        match self {
            JumpComponent::PointMass { x, .. } => x[..m].iter().all(|v| *v >= 0.0),
            JumpComponent::Gaussian { mean, cov, restricted, .. } => {
                *restricted || (0..m).all(|k| cov[k][k] == 0.0 && mean[k] >= 0.0)
            }
            JumpComponent::Exponential { axis, .. } => *axis >= 1 && *axis <= m,
            JumpComponent::Numeric { density, .. } => density.lo[..m].iter().all(|v| *v >= 0.0),
        }
    }

    fn numeric(&self, shape: &StateSpaceShape) -> Result<Option<(NumericDensity, f64)>> {
        Ok(match self {
            JumpComponent::Numeric { density, weight } => Some((density.clone(), *weight)),
            JumpComponent::Gaussian { mean, cov, weight, restricted: true } => {
                Some((gaussian_as_numeric(mean, cov, shape)?, *weight))
            }
            _ => None,
        })
    }

    /// `∫ (e^{<x,u>} - 1 - <h(x),u>) ν(dx)` for this component.
    pub fn lk_integral(&self, shape: &StateSpaceShape, u: &[Complex64]) -> Result<Complex64> {
        if let Some((dens, w)) = self.numeric(shape)? {
            let f = |x: &[f64]| {
                let mut dot = Complex64::new(0.0, 0.0);
                let mut th = Complex64::new(0.0, 0.0);
                for k in 0..x.len() {
                    dot += u[k] * x[k];
                    th += u[k] * trunc(x[k]);
                }
                (dot.exp() - 1.0 - th) * (dens.f)(x)
            };
            return Ok(box_integrate(&f, &dens.lo, &dens.hi)? * w);
        }
        Ok(match self {
            JumpComponent::PointMass { x, weight } => {
                let mut dot = Complex64::new(0.0, 0.0);
                let mut th = Complex64::new(0.0, 0.0);
                for k in 0..x.len() {
                    dot += u[k] * x[k];
                    th += u[k] * trunc(x[k]);
                }
                (dot.exp() - 1.0 - th) * *weight
            }
            JumpComponent::Gaussian { mean, cov, weight, .. } => {
                let d = mean.len();
                let mut expo = Complex64::new(0.0, 0.0);
                let mut th = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    expo += u[i] * mean[i];
                    for j in 0..d {
                        expo += 0.5 * u[i] * cov[i][j] * u[j];
                    }
                    th += u[i] * truncated_normal_moments(mean[i], cov[i][i].sqrt()).1;
                }
                (expo.exp() - 1.0 - th) * *weight
            }
            JumpComponent::Exponential { rate, axis, weight } => {
                let uk = u[axis - 1];
                if uk.re >= *rate {
                    return Err(Error::DivergentIntegral(format!(
                        "exponential jump rate {rate} does not dominate Re u = {}",
                        uk.re
                    )));
                }
                (*rate / (*rate - uk) - 1.0 - uk * exponential_moments(*rate).0) * *weight
            }
            JumpComponent::Numeric { .. } => unreachable!(),
        })
    }

    /// `(∫ h_k dν, ∫ h_k^2 dν)` for the 0-based coordinate `k`.
    pub fn h_moments(&self, shape: &StateSpaceShape, k: usize) -> Result<(f64, f64)> {
        if let Some((dens, w)) = self.numeric(shape)? {
            let f = |x: &[f64]| {
                let h = trunc(x[k]);
                vec![h * (dens.f)(x), h * h * (dens.f)(x)]
            };
            let v: Vec<f64> = box_integrate(&f, &dens.lo, &dens.hi)?;
            return Ok((w * v[0], w * v[1]));
        }
        Ok(match self {
            JumpComponent::PointMass { x, weight } => {
                let h = trunc(x[k]);
                (weight * h, weight * h * h)
            }
            JumpComponent::Gaussian { mean, cov, weight, .. } => {
                let (_, e1, e2) = truncated_normal_moments(mean[k], cov[k][k].sqrt());
                (weight * e1, weight * e2)
            }
            JumpComponent::Exponential { rate, axis, weight } => {
                if *axis == k + 1 {
                    let (e1, e2) = exponential_moments(*rate);
                    (weight * e1, weight * e2)
                } else {
                    (0.0, 0.0)
                }
            }
            JumpComponent::Numeric { .. } => unreachable!(),
        })
    }
}

/// A finite sum of jump components, scaled by a nonnegative function of time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "MeasureRepr")]
pub struct JumpMeasureSpec {
    pub components: Vec<JumpComponent>,
    #[serde(default = "unit_scale")]
    pub scale: crate::timefn::TimeFn,
}

fn unit_scale() -> crate::timefn::TimeFn {
    crate::timefn::TimeFn::Const(1.0)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MeasureRepr {
    List(Vec<JumpComponent>),
    Full {
        components: Vec<JumpComponent>,
        #[serde(default = "unit_scale")]
        scale: crate::timefn::TimeFn,
    },
}

impl From<MeasureRepr> for JumpMeasureSpec {
    fn from(r: MeasureRepr) -> Self {
        match r {
            MeasureRepr::List(components) => JumpMeasureSpec { components, scale: unit_scale() },
            MeasureRepr::Full { components, scale } => JumpMeasureSpec { components, scale },
        }
    }
}

impl Default for JumpMeasureSpec {
    fn default() -> Self {
        Self::empty()
    }
}

impl JumpMeasureSpec {
    pub fn new(components: Vec<JumpComponent>) -> Self {
        JumpMeasureSpec { components, scale: unit_scale() }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn point_mass(x: Vec<f64>, weight: f64) -> Self {
        Self::new(vec![JumpComponent::PointMass { x, weight }])
    }

    pub fn with_scale(mut self, scale: crate::timefn::TimeFn) -> Self {
        self.scale = scale;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty() || self.scale.is_zero()
    }

    pub fn validate(&self, shape: &StateSpaceShape) -> Result<()> {
        self.components.iter().try_for_each(|c| c.validate(shape))
    }

    /// Scaled jump integral `s(t) ∫ (e^{<x,u>} - 1 - <h(x),u>) μ(dx)`.
    pub fn lk_integral(&self, shape: &StateSpaceShape, t: f64, u: &[Complex64]) -> Result<Complex64> {
        if self.components.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let s = self.scale.eval(t);
        if s == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.components {
            acc += c.lk_integral(shape, u)?;
        }
        Ok(acc * s)
    }

    /// `(∫ h_k dμ(t), ∫ h_k^2 dμ(t))`.
    pub fn h_moments(&self, shape: &StateSpaceShape, t: f64, k: usize) -> Result<(f64, f64)> {
        let s = self.scale.eval(t);
        let mut acc = (0.0, 0.0);
        if s == 0.0 {
            return Ok(acc);
        }
        for c in &self.components {
            let (a, b) = c.h_moments(shape, k)?;
            acc.0 += a;
            acc.1 += b;
        }
        Ok((s * acc.0, s * acc.1))
    }
}
