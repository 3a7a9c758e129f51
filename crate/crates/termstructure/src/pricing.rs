//! Bond prices, forward rates and the numéraire along one simulated path of `X = (A, ∫r, r)`.
//!
//! Every path integral `∫_{(0,t]} g(s)·dX_s` is split as follows. The first component is
//! deterministic (`dX¹ = dA`) and goes through the driver. The other two are integrated by
//! parts on each stretch between jump times, using `dR = r ds`:
//!
//! ```text
//! ∫_{(a,b]} g²dR + g³dr = [g³r + g²R - (∂g³)R]_{a+}^{b} + ∫_a^b R (∂²g³ - ∂g²) ds
//! ```
//!
//! The remainder integrand vanishes for the exponential kernel, so the result is exact there;
//! otherwise it is integrated with the trapezoid rule on the path grid.

use ajk_measure::{Error, Result};

use crate::loadings::{Field, Loadings};
use crate::model::TermStructureModel;

/// A path on `grid`, row-major `states[j * 3 + k]`.
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    pub grid: &'a [f64],
    pub states: &'a [f64],
}

impl PathView<'_> {
    fn r(&self, j: usize) -> f64 {
        self.states[3 * j + 2]
    }

    fn big_r(&self, j: usize) -> f64 {
        self.states[3 * j + 1]
    }
}

/// Stochastic part of `∫_{(0,t_j]} g·dX` for `g` given by `field`.
pub(crate) fn stochastic_part(l: &Loadings, field: Field, path: PathView<'_>, j: usize) -> f64 {
    let grid = path.grid;
    let trapz = !l.remainder_vanishes(field);
    let mut total = 0.0;
    let mut start = 0;
    for b in 1..=j {
        if b < j && !l.is_jump_time(grid[b]) {
            continue;
        }
        let (ta, tb) = (grid[start], grid[b]);
        let ga = if start > 0 && l.is_jump_time(ta) { l.value_after(field, ta) } else { l.value(field, ta) };
        let gb = l.value(field, tb);
        let (ra, rb, big_ra, big_rb) = (path.r(start), path.r(b), path.big_r(start), path.big_r(b));
        total += gb[2] * rb - ga[2] * ra + gb[1] * big_rb - ga[1] * big_ra;
        total -= l.d3(field, tb) * big_rb - l.d3(field, ta) * big_ra;
        if trapz {
            let mut prev = path.big_r(start) * l.remainder(field, ta);
            for i in start + 1..=b {
                let cur = path.big_r(i) * l.remainder(field, grid[i]);
                total += 0.5 * (grid[i] - grid[i - 1]) * (prev + cur);
                prev = cur;
            }
        }
        start = b;
    }
    total
}

/// `∫_{(t,T]} f(0,u) dA_u + ∫_{(0,t]} (A¹(s,T) - A¹(s,t)) dA_s`.
pub(crate) fn bond_deterministic(m: &TermStructureModel, t: f64, t_end: f64) -> Result<f64> {
    let drv = m.driver();
    let f0: f64 = drv.integrate(|u| m.f0.eval(u), t, t_end)?;
    let l = &m.loadings;
    let load: f64 = drv.integrate(|s| l.big_a(s, t_end)[0] - l.big_a(s, t)[0], 0.0, t)?;
    Ok(f0 + load)
}

/// `∫_{(0,t]} (f(0,s) + A¹(s,t)) dA_s`.
pub(crate) fn numeraire_deterministic(m: &TermStructureModel, t: f64) -> Result<f64> {
    let l = &m.loadings;
    m.driver().integrate(|s| m.f0.eval(s) + l.big_a(s, t)[0], 0.0, t)
}

fn check_index(m: &TermStructureModel, path: PathView<'_>, j: usize) -> Result<f64> {
    if path.states.len() != 3 * path.grid.len() {
        return Err(Error::PreconditionViolated("path must have three coordinates per grid point".into()));
    }
    let t = *path
        .grid
        .get(j)
        .ok_or_else(|| Error::PreconditionViolated(format!("grid index {j} out of range")))?;
    let horizon = m.horizon();
    if t > horizon {
        return Err(Error::OutOfDomain { t, horizon });
    }
    Ok(t)
}

/// `P(t,T) = exp(-∫_{(t,T]} f(t,u) dA_u)` at `t = grid[j]`, with the forward curve rebuilt from
/// `f(0,·)` and the path.
pub fn bond_price(m: &TermStructureModel, path: PathView<'_>, j: usize, t_end: f64) -> Result<f64> {
    let t = check_index(m, path, j)?;
    if t_end < t {
        return Err(Error::PreconditionViolated(format!("maturity {t_end} before valuation time {t}")));
    }
    if t_end > m.horizon() {
        return Err(Error::OutOfDomain { t: t_end, horizon: m.horizon() });
    }
    if t_end == t {
        return Ok(1.0);
    }
    let l = &m.loadings;
    let stoch = stochastic_part(l, Field::Big(t_end), path, j) - stochastic_part(l, Field::Big(t), path, j);
    Ok((-bond_deterministic(m, t, t_end)? - stoch).exp())
}

/// `exp(∫_{(0,t]} f(s,s) dA_s)` at `t = grid[j]`.
pub fn numeraire(m: &TermStructureModel, path: PathView<'_>, j: usize) -> Result<f64> {
    let t = check_index(m, path, j)?;
    Ok((numeraire_deterministic(m, t)? + stochastic_part(&m.loadings, Field::Big(t), path, j)).exp())
}

/// `f(t,u)` at `t = grid[j]` for `u >= t` not a jump time.
pub fn forward_rate(m: &TermStructureModel, path: PathView<'_>, j: usize, u: f64) -> Result<f64> {
    let t = check_index(m, path, j)?;
    if u < t {
        return Err(Error::PreconditionViolated(format!("forward date {u} before {t}")));
    }
    if m.loadings.is_jump_time(u) {
        return Err(Error::PreconditionViolated(format!("{u} is a jump time; the forward loading is an atom there")));
    }
    let l = &m.loadings;
    let det: f64 = m.driver().integrate(|s| l.small_a(s, u)[0], 0.0, t)?;
    Ok(m.f0.eval(u) + det + stochastic_part(l, Field::Small(u), path, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loadings::Loadings;
    use crate::model::ForwardCurve;
    use ajk_models::vasicek_hjm_state;

    #[test]
    fn flat_curve_without_loadings() {
        let x = vasicek_hjm_state(0.0, -1.0, 0.0, 0.0, &[], 4.0).unwrap();
        let m = TermStructureModel::new(x, vec![0.0; 3], ForwardCurve::flat(0.03), Loadings::zero()).unwrap();
        let grid = [0.0, 1.0];
        let states = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let path = PathView { grid: &grid, states: &states };
        assert!((bond_price(&m, path, 0, 3.0).unwrap() - (-0.09f64).exp()).abs() < 1e-14);
        assert!((bond_price(&m, path, 1, 3.0).unwrap() - (-0.06f64).exp()).abs() < 1e-14);
        assert_eq!(bond_price(&m, path, 1, 1.0).unwrap(), 1.0);
        assert!((numeraire(&m, path, 1).unwrap() - 0.03f64.exp()).abs() < 1e-14);
        assert!(matches!(bond_price(&m, path, 0, 5.0), Err(Error::OutOfDomain { .. })));
        assert!(bond_price(&m, path, 1, 0.5).is_err());
    }
}
