//! Canonical state space `D = R_{>=0}^m × R^n` and its Fourier–Laplace domain
//! `U = C_{<=0}^m × iR^n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ajk_measure::{Error, Result};

/// Slack allowed on `Re u_k <= 0` before an argument counts as outside `U`.
pub const U_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpaceShape {
    pub m: usize,
    pub n: usize,
}

impl StateSpaceShape {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m + n == 0 {
            return Err(Error::InvalidParameter("state dimension must be at least 1".into()));
        }
        Ok(StateSpaceShape { m, n })
    }

    pub fn d(&self) -> usize {
        self.m + self.n
    }

    /// Nonnegative coordinates `I` (0-based).
    pub fn positive(&self) -> std::ops::Range<usize> {
        0..self.m
    }

    /// Real coordinates `J` (0-based).
    pub fn real(&self) -> std::ops::Range<usize> {
        self.m..self.d()
    }

    pub fn contains_state(&self, x: &[f64]) -> bool {
        x.len() == self.d() && x[..self.m].iter().all(|v| *v >= 0.0)
    }

    /// `Re u_k <= 0` on the nonnegative coordinates, up to [`U_TOL`].
    pub fn check_u(&self, u: &[Complex64]) -> Result<()> {
        if u.len() != self.d() {
            return Err(Error::DomainViolation(format!("expected {} components, got {}", self.d(), u.len())));
        }
        for (k, uk) in u[..self.m].iter().enumerate() {
            if uk.re > U_TOL {
                return Err(Error::DomainViolation(format!("Re u_{} = {} > 0", k + 1, uk.re)));
            }
        }
        Ok(())
    }
}
