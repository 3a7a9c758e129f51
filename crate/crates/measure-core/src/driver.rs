//! The driver `A`: an absolutely continuous part given by piecewise densities plus finitely
//! many atoms.
//!
//! ```text
//! A(t) = ∫_0^t a(s) ds + Σ_{t_j <= t} ΔA_j
//! ∫_{(s,t]} g dA = ∫_s^t g a ds + Σ_{s < t_j <= t} g(t_j) ΔA_j
//! ```
//!
//! Polynomial densities are evaluated in absolute time, `a(t) = Σ c_k t^k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::vector::VectorSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Const,
    Poly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub kind: DensityKind,
    pub coeffs: Vec<f64>,
}

impl Density {
    pub fn constant(c: f64) -> Self {
        Density { kind: DensityKind::Const, coeffs: vec![c] }
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        Density { kind: DensityKind::Poly, coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            DensityKind::Const => self.coeffs.first().copied().unwrap_or(0.0),
            DensityKind::Poly => self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    /// Exact `∫_a^b density`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            DensityKind::Const => self.eval(a) * (b - a),
            DensityKind::Poly => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let p = (k + 1) as i32;
                    c * (b.powi(p) - a.powi(p)) / p as f64
                })
                .sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub density: Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    #[serde(rename = "dA")]
    pub da: f64,
}

#[derive(Deserialize)]
struct RawDriver {
    segments: Vec<Segment>,
    #[serde(default)]
    atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDriver")]
pub struct DriverMeasure {
    segments: Vec<Segment>,
    atoms: Vec<Atom>,
}

impl TryFrom<RawDriver> for DriverMeasure {
    type Error = Error;
    fn try_from(raw: RawDriver) -> Result<Self> {
        DriverMeasure::new(raw.segments, raw.atoms)
    }
}

impl DriverMeasure {
    pub fn new(segments: Vec<Segment>, atoms: Vec<Atom>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDriver(m));
        if segments.is_empty() {
            return bad("at least one segment is required".into());
        }
        if segments[0].t0 != 0.0 {
            return bad("segments must start at 0".into());
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.t1 > s.t0) || !s.t1.is_finite() {
                return bad(format!("segment {i} is empty or unbounded"));
            }
            if i > 0 && segments[i - 1].t1 != s.t0 {
                return bad(format!("segment {i} does not continue segment {}", i - 1));
            }
            if s.density.coeffs.is_empty() {
                return bad(format!("segment {i} has no density coefficients"));
            }
            // sample the density for nonnegativity; exact for constants and affine densities
            for k in 0..=32 {
                let t = s.t0 + (s.t1 - s.t0) * k as f64 / 32.0;
                if s.density.eval(t) < 0.0 {
                    return bad(format!("negative density on segment {i} at t = {t}"));
                }
            }
        }
        let horizon = segments.last().unwrap().t1;
        for (j, a) in atoms.iter().enumerate() {
            if !(a.da > 0.0) || !a.da.is_finite() {
                return bad(format!("atom {j} has nonpositive mass"));
            }
            if !(a.t > 0.0 && a.t <= horizon) {
                return bad(format!("atom {j} at {} outside (0, {horizon}]", a.t));
            }
            if j > 0 && atoms[j - 1].t >= a.t {
                return bad("atom times must be strictly increasing".into());
            }
        }
        Ok(DriverMeasure { segments, atoms })
    }

    /// Lebesgue measure on `[0, horizon]`.
    pub fn lebesgue(horizon: f64) -> Result<Self> {
        Self::lebesgue_with_atoms(horizon, &[])
    }

    pub fn lebesgue_with_atoms(horizon: f64, atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            vec![Segment { t0: 0.0, t1: horizon, density: Density::constant(1.0) }],
            atoms.iter().map(|&(t, da)| Atom { t, da }).collect(),
        )
    }

    /// Purely atomic driver on `[0, horizon]`.
    pub fn pure_atoms(horizon: f64, atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            vec![Segment { t0: 0.0, t1: horizon, density: Density::constant(0.0) }],
            atoms.iter().map(|&(t, da)| Atom { t, da }).collect(),
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn horizon(&self) -> f64 {
        self.segments.last().unwrap().t1
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < 0.0 || t > self.horizon() || t.is_nan() {
            Err(Error::OutOfDomain { t, horizon: self.horizon() })
        } else {
            Ok(())
        }
    }

    /// Right-continuous density `a(t)`; zero outside `[0, horizon]`.
    pub fn density(&self, t: f64) -> f64 {
        let n = self.segments.len();
        let i = self.segments.partition_point(|s| s.t1 <= t);
        if i < n {
            if t >= self.segments[i].t0 {
                self.segments[i].density.eval(t)
            } else {
                0.0
            }
        } else if t == self.horizon() {
            self.segments[n - 1].density.eval(t)
        } else {
            0.0
        }
    }

    /// Mass of the atom at `t`, if any. Times are compared exactly.
    pub fn atom_at(&self, t: f64) -> Option<f64> {
        self.atoms
            .binary_search_by(|a| a.t.partial_cmp(&t).unwrap())
            .ok()
            .map(|j| self.atoms[j].da)
    }

    /// Atoms with `s < t_j <= t`, in increasing time.
    pub fn atoms_in(&self, s: f64, t: f64) -> &[Atom] {
        let lo = self.atoms.partition_point(|a| a.t <= s);
        let hi = self.atoms.partition_point(|a| a.t <= t);
        if lo >= hi {
            &[]
        } else {
            &self.atoms[lo..hi]
        }
    }

    /// `A^c(t) - A^c(s)`, exact.
    pub fn continuous_mass(&self, s: f64, t: f64) -> f64 {
        self.segments
            .iter()
            .filter_map(|seg| {
                let a = seg.t0.max(s);
                let b = seg.t1.min(t);
                (b > a).then(|| seg.density.mass(a, b))
            })
            .sum()
    }

    /// `A(t) = A^c(t) + Σ_{t_j <= t} ΔA_j`.
    pub fn eval_a(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let jumps: f64 = self.atoms_in(0.0, t).iter().map(|a| a.da).sum();
        Ok(self.continuous_mass(0.0, t) + jumps)
    }

    /// Sorted segment boundaries and atom times strictly inside `(s, t)`, with `s` and `t`
    /// prepended and appended.
    pub fn breakpoints(&self, s: f64, t: f64) -> Vec<f64> {
        let mut pts = vec![s];
        let inner = self
            .segments
            .iter()
            .map(|seg| seg.t0)
            .chain(self.atoms.iter().map(|a| a.t))
            .filter(|&x| x > s && x < t);
        pts.extend(inner);
        pts.push(t);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// `∫_s^t g dA^c` split at segment boundaries and atoms.
    pub fn integrate_continuous<V, G>(&self, mut g: G, s: f64, t: f64) -> Result<V>
    where
        V: VectorSpace,
        G: FnMut(f64) -> V,
    {
        let mut total: Option<V> = None;
        let pts = self.breakpoints(s, t);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let i = self.segments.partition_point(|seg| seg.t1 <= mid).min(self.segments.len() - 1);
            let dens = &self.segments[i].density;
            if dens.is_zero() {
                continue;
            }
            let v = quadrature::integrate(
                |x| {
                    let mut y = g(x);
                    y.scale(dens.eval(x));
                    y
                },
                a,
                b,
            )?;
            match total.as_mut() {
                Some(tot) => tot.axpy(1.0, &v),
                None => total = Some(v),
            }
        }
        match total {
            Some(v) => Ok(v),
            None => Ok(g(t).zeros_like()),
        }
    }

    /// `∫_{(s,t]} g dA`: the atom at `s` is excluded, an atom at `t` is included.
    pub fn integrate<V, G>(&self, mut g: G, s: f64, t: f64) -> Result<V>
    where
        V: VectorSpace,
        G: FnMut(f64) -> V,
    {
        if s > t {
            return Err(Error::PreconditionViolated(format!("integration bounds {s} > {t}")));
        }
        self.check_time(s)?;
        self.check_time(t)?;
        let mut total = self.integrate_continuous(&mut g, s, t)?;
        for a in self.atoms_in(s, t) {
            total.axpy(a.da, &g(a.t));
        }
        Ok(total)
    }
}
