//! Backward solver for measure differential equations
//!
//! ```text
//! dy/dA^c = G(t, y)          between atoms
//! y(t_j-) = J(t_j, ΔA_j, y(t_j))   at atoms, processed in decreasing time
//! ```
//!
//! On each atom-free stretch the equation is an ODE in calendar time, `y' = a(t) G(t, y)`,
//! integrated with [`dopri5`](crate::ode::dopri5). An atom at the terminal time is
//! processed first.

use crate::driver::DriverMeasure;
use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeOptions};
use crate::trajectory::{Node, StieltjesTrajectory};
use crate::vector::VectorSpace;

pub trait BackwardProblem<V> {
    /// `dy/dA^c` on atom-free stretches.
    fn deriv(&self, t: f64, y: &V) -> Result<V>;
    /// Left limit `y(t-)` at an atom with mass `da`, given the right value `y`.
    fn jump(&self, t: f64, da: f64, y: &V) -> Result<V>;
    /// Called after every accepted step and jump; may project `y` and returns whether it did.
    fn check(&self, _t: f64, _y: &mut V) -> Result<bool> {
        Ok(false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord<V> {
    pub t: f64,
    pub right: V,
    pub left: V,
}

#[derive(Debug, Clone)]
pub struct BackwardSolution<V> {
    pub trajectory: StieltjesTrajectory<V>,
    /// In decreasing time, as processed.
    pub jumps: Vec<JumpRecord<V>>,
    pub steps: usize,
}

/// Solves from `y(t_terminal) = terminal` down to `t_end`, landing exactly on every entry of
/// `stops` inside `[t_end, t_terminal]`.
pub fn solve_backward<V, P>(
    a: &DriverMeasure,
    problem: &P,
    terminal: V,
    t_terminal: f64,
    t_end: f64,
    stops: &[f64],
    opts: &OdeOptions,
) -> Result<BackwardSolution<V>>
where
    V: VectorSpace,
    P: BackwardProblem<V> + ?Sized,
{
    let horizon = a.horizon();
    for t in [t_terminal, t_end] {
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::OutOfDomain { t, horizon });
        }
    }
    if t_end > t_terminal {
        return Err(Error::PreconditionViolated(format!("t_end {t_end} > terminal time {t_terminal}")));
    }
    let mut knots = a.breakpoints(t_end, t_terminal);
    knots.extend(stops.iter().copied().filter(|&s| s > t_end && s < t_terminal));
    knots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    knots.dedup();

    let segments = a.segments();
    let mut nodes: Vec<Node<V>> = Vec::new();
    let mut jumps = Vec::new();
    let mut y = terminal;
    let mut steps = 0;
    let mut h_guess: Option<f64> = None;
    let mut upper_dy: Option<V> = None;

    for (k, &t) in knots.iter().enumerate() {
        let next = knots.get(k + 1).copied();
        // density of the stretch just below t
        let seg = next.map(|tn| {
            let mid = 0.5 * (t + tn);
            let i = segments.partition_point(|s| s.t1 <= mid).min(segments.len() - 1);
            &segments[i].density
        });
        let dy_here = |y: &V| -> Result<V> {
            match seg {
                Some(d) if !d.is_zero() => {
                    let mut g = problem.deriv(t, y)?;
                    g.scale(d.eval(t));
                    Ok(g)
                }
                _ => Ok(y.zeros_like()),
            }
        };
        let atom = if t > t_end { a.atom_at(t) } else { None };
        let right_dy = match upper_dy.take() {
            Some(d) => d,
            None => dy_here(&y)?,
        };
        nodes.push(Node { t, y: y.clone(), dy: right_dy, left: false });
        if let Some(da) = atom {
            let mut left = problem.jump(t, da, &y)?;
            problem.check(t, &mut left)?;
            jumps.push(JumpRecord { t, right: y, left: left.clone() });
            y = left;
            nodes.push(Node { t, y: y.clone(), dy: dy_here(&y)?, left: true });
        } else if k > 0 && next.is_some() && segments.iter().any(|s| s.t0 == t) {
            // density may jump here: keep one node per side
            nodes.push(Node { t, y: y.clone(), dy: dy_here(&y)?, left: true });
        }
        let Some(tn) = next else { break };
        let dens = seg.unwrap();
        if dens.is_zero() {
            upper_dy = Some(y.zeros_like());
            continue;
        }
        let mut f = |s: f64, y: &V| -> Result<V> {
            let mut g = problem.deriv(s, y)?;
            g.scale(dens.eval(s));
            Ok(g)
        };
        let mut inner: Vec<Node<V>> = Vec::new();
        let mut observe = |s: f64, y: &mut V, dy: &V| -> Result<bool> {
            let changed = problem.check(s, y)?;
            if s != tn {
                inner.push(Node { t: s, y: y.clone(), dy: dy.clone(), left: false });
            }
            Ok(changed)
        };
        let end = dopri5(&mut f, t, y, tn, opts, h_guess, &mut observe)?;
        steps += end.steps;
        h_guess = Some(end.h_next);
        upper_dy = Some(end.dy);
        nodes.extend(inner);
        y = end.y;
    }
    nodes.reverse();
    Ok(BackwardSolution { trajectory: StieltjesTrajectory::from_nodes(nodes), jumps, steps })
}

/// Scalar problem `dy/dA = -F(t, y)` with the explicit atom rule `y(t-) = y(t) + F(t, y(t)) ΔA`.
pub struct ScalarEquation<F> {
    pub f: F,
}

impl<F: Fn(f64, f64) -> f64> BackwardProblem<f64> for ScalarEquation<F> {
    fn deriv(&self, t: f64, y: &f64) -> Result<f64> {
        Ok(-(self.f)(t, *y))
    }
    fn jump(&self, t: f64, da: f64, y: &f64) -> Result<f64> {
        Ok(y + (self.f)(t, *y) * da)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_scalar_with_atom() {
        // dy/dA = -c y on Lebesgue + atom(0.5, 1): y(0) = e^c (1 + c)
        let c = 0.7;
        let a = DriverMeasure::lebesgue_with_atoms(1.0, &[(0.5, 1.0)]).unwrap();
        let p = ScalarEquation { f: |_t: f64, y: f64| c * y };
        let sol = solve_backward(&a, &p, 1.0, 1.0, 0.0, &[], &OdeOptions::default()).unwrap();
        let y0 = *sol.trajectory.at_node(0.0).unwrap();
        assert!((y0 - c.exp() * (1.0 + c)).abs() < 1e-9);
        assert_eq!(sol.jumps.len(), 1);
        assert!((sol.jumps[0].left - sol.jumps[0].right * (1.0 + c)).abs() < 1e-15);
        assert_eq!(sol.trajectory.left_limit(0.5), Some(&sol.jumps[0].left));
    }

    #[test]
    fn atom_at_terminal_time_is_processed_first() {
        let a = DriverMeasure::pure_atoms(1.0, &[(1.0, 2.0)]).unwrap();
        let p = ScalarEquation { f: |_t: f64, y: f64| y };
        let sol = solve_backward(&a, &p, 1.0, 1.0, 0.0, &[], &OdeOptions::default()).unwrap();
        assert_eq!(*sol.trajectory.at_node(0.0).unwrap(), 3.0);
        assert_eq!(*sol.trajectory.at_node(1.0).unwrap(), 1.0);
    }

    #[test]
    fn atom_at_end_time_is_not_crossed() {
        let a = DriverMeasure::pure_atoms(1.0, &[(0.5, 2.0)]).unwrap();
        let p = ScalarEquation { f: |_t: f64, y: f64| y };
        let sol = solve_backward(&a, &p, 1.0, 1.0, 0.5, &[], &OdeOptions::default()).unwrap();
        assert_eq!(*sol.trajectory.at_node(0.5).unwrap(), 1.0);
        assert!(sol.jumps.is_empty());
    }

    #[test]
    fn lands_on_stops() {
        let a = DriverMeasure::lebesgue(2.0).unwrap();
        let p = ScalarEquation { f: |_t: f64, y: f64| -y };
        let sol = solve_backward(&a, &p, 1.0, 2.0, 0.0, &[0.3, 1.7], &OdeOptions::default()).unwrap();
        for s in [0.3, 1.7] {
            let v = *sol.trajectory.at_node(s).unwrap();
            assert!((v - (-(2.0 - s)).exp()).abs() < 1e-9);
        }
    }
}
