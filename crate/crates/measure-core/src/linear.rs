//! The linear measure equation `dg/dA = -L g`, `g(T) = g_T`, and related bounds.
//!
//! ```text
//! ℰ_t^T = exp(∫_t^T L dA^c) · Π_{t_j ∈ (t,T]} (1 + L(t_j) ΔA_j)
//! g(t)  = ℰ_t^T g_T
//! ```
//!
//! The matrix case is solved by product integration: on atom-free pieces the propagator is
//! `exp(∫ a L ds)`, refined by bisection until the split and unsplit products agree.

use nalgebra::{DMatrix, DVector};

use crate::driver::DriverMeasure;
use crate::error::{Error, Result};
use crate::trajectory::{Node, StieltjesTrajectory};

/// Minimum number of propagator pieces per atom-free stretch.
const MIN_PIECES: usize = 8;
const COMMUTE_TOL: f64 = 1e-14;
const MAX_DEPTH: u32 = 30;

fn check_bounds(a: &DriverMeasure, t: f64, t_terminal: f64) -> Result<()> {
    if t > t_terminal {
        return Err(Error::PreconditionViolated(format!("t = {t} exceeds T = {t_terminal}")));
    }
    a.eval_a(t)?;
    a.eval_a(t_terminal)?;
    Ok(())
}

/// `ℰ_t^T(L dA)`; fails when some factor `1 + L(t_j) ΔA_j` is negative.
pub fn pseudo_exponential<L: Fn(f64) -> f64>(a: &DriverMeasure, l: L, t: f64, t_terminal: f64) -> Result<f64> {
    check_bounds(a, t, t_terminal)?;
    let cont: f64 = a.integrate_continuous(&l, t, t_terminal)?;
    let mut prod = 1.0;
    for atom in a.atoms_in(t, t_terminal) {
        let f = 1.0 + l(atom.t) * atom.da;
        if f < 0.0 {
            return Err(Error::PreconditionViolated(format!(
                "1 + L ΔA = {f} < 0 at atom t = {}",
                atom.t
            )));
        }
        prod *= f;
    }
    Ok(cont.exp() * prod)
}

/// `δ exp(∫_{(t,T]} L dA)`.
pub fn gronwall_bound<L: Fn(f64) -> f64>(
    a: &DriverMeasure,
    delta: f64,
    l: L,
    t: f64,
    t_terminal: f64,
) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::PreconditionViolated(format!("delta = {delta} < 0")));
    }
    check_bounds(a, t, t_terminal)?;
    let i: f64 = a.integrate(&l, t, t_terminal)?;
    Ok(delta * i.exp())
}

fn propagator<L>(a: &DriverMeasure, l: &L, dim: usize, r0: f64, r1: f64) -> Result<DMatrix<f64>>
where
    L: Fn(f64) -> DMatrix<f64>,
{
    let m: Vec<f64> = a.integrate_continuous(|s| l(s).as_slice().to_vec(), r0, r1)?;
    let mut omega = DMatrix::from_column_slice(dim, dim, &m);
    if dim > 1 {
        // fourth-order Magnus correction from the two Gauss points, in backward time
        let h = r1 - r0;
        let c = 3f64.sqrt() / 6.0;
        let (s1, s2) = (r1 - h * (0.5 - c), r1 - h * (0.5 + c));
        let b1 = l(s1) * a.density(s1);
        let b2 = l(s2) * a.density(s2);
        omega += (&b2 * &b1 - &b1 * &b2) * (3f64.sqrt() / 12.0 * h * h);
    }
    Ok(omega.exp())
}

/// Propagator mapping `g(r1)` to `g(r0)` across an atom-free piece.
fn refine<L>(a: &DriverMeasure, l: &L, dim: usize, r0: f64, r1: f64, whole: DMatrix<f64>, depth: u32) -> Result<DMatrix<f64>>
where
    L: Fn(f64) -> DMatrix<f64>,
{
    if dim == 1 || depth >= MAX_DEPTH {
        return Ok(whole);
    }
    let mid = 0.5 * (r0 + r1);
    let lower = propagator(a, l, dim, r0, mid)?;
    let upper = propagator(a, l, dim, mid, r1)?;
    let split = &lower * &upper;
    let scale = 1.0 + whole.norm();
    if (&split - &whole).norm() <= COMMUTE_TOL * scale {
        return Ok(whole);
    }
    let lower = refine(a, l, dim, r0, mid, lower, depth + 1)?;
    let upper = refine(a, l, dim, mid, r1, upper, depth + 1)?;
    Ok(lower * upper)
}

/// Solves `dg/dA = -L g` backward from `g(T) = terminal` on `[0, T]`.
///
/// Nodes hold the right values; left limits are recorded at atoms. At an atom
/// `g(t_j-) = (I + L(t_j) ΔA_j) g(t_j)`.
pub fn solve_linear<L>(
    a: &DriverMeasure,
    l: L,
    terminal: DVector<f64>,
    t_terminal: f64,
) -> Result<StieltjesTrajectory<Vec<f64>>>
where
    L: Fn(f64) -> DMatrix<f64>,
{
    check_bounds(a, 0.0, t_terminal)?;
    let dim = terminal.len();
    let mut knots = a.breakpoints(0.0, t_terminal);
    knots.reverse();
    let segments = a.segments();
    let deriv = |t: f64, dens: f64, g: &DVector<f64>| -> Vec<f64> {
        (-(l(t) * g) * dens).as_slice().to_vec()
    };
    let mut g = terminal;
    let mut nodes = Vec::new();
    let mut upper_dy: Option<Vec<f64>> = None;
    for (k, &t) in knots.iter().enumerate() {
        let next = knots.get(k + 1).copied();
        let dens = next.map(|tn| {
            let mid = 0.5 * (t + tn);
            let i = segments.partition_point(|s| s.t1 <= mid).min(segments.len() - 1);
            segments[i].density.clone()
        });
        let dens_at = |s: f64| dens.as_ref().map(|d| d.eval(s)).unwrap_or(0.0);
        let right_dy = upper_dy.take().unwrap_or_else(|| deriv(t, dens_at(t), &g));
        nodes.push(Node { t, y: g.as_slice().to_vec(), dy: right_dy, left: false });
        if let Some(da) = a.atom_at(t).filter(|_| t > 0.0) {
            let lt = l(t);
            let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || lt[(i, j)] == 0.0));
            if diagonal {
                for i in 0..dim {
                    let f = 1.0 + lt[(i, i)] * da;
                    if f < 0.0 {
                        return Err(Error::PreconditionViolated(format!(
                            "1 + L ΔA = {f} < 0 at atom t = {t}"
                        )));
                    }
                }
            }
            g = (DMatrix::identity(dim, dim) + lt * da) * g;
            nodes.push(Node { t, y: g.as_slice().to_vec(), dy: deriv(t, dens_at(t), &g), left: true });
        } else if k > 0 && next.is_some() && segments.iter().any(|s| s.t0 == t) {
            nodes.push(Node { t, y: g.as_slice().to_vec(), dy: deriv(t, dens_at(t), &g), left: true });
        }
        let Some(tn) = next else { break };
        if dens.as_ref().unwrap().is_zero() {
            upper_dy = Some(vec![0.0; dim]);
            continue;
        }
        let h = (t - tn) / MIN_PIECES as f64;
        for p in 0..MIN_PIECES {
            let r1 = t - h * p as f64;
            let r0 = if p + 1 == MIN_PIECES { tn } else { t - h * (p + 1) as f64 };
            let whole = propagator(a, &l, dim, r0, r1)?;
            g = refine(a, &l, dim, r0, r1, whole, 0)? * g;
            if p + 1 < MIN_PIECES {
                nodes.push(Node { t: r0, y: g.as_slice().to_vec(), dy: deriv(r0, dens_at(r0), &g), left: false });
            }
        }
        upper_dy = Some(deriv(tn, dens_at(tn), &g));
    }
    nodes.reverse();
    Ok(StieltjesTrajectory::from_nodes(nodes))
}

/// Scalar convenience wrapper around [`solve_linear`].
pub fn solve_linear_scalar<L: Fn(f64) -> f64>(
    a: &DriverMeasure,
    l: L,
    terminal: f64,
    t_terminal: f64,
) -> Result<StieltjesTrajectory<f64>> {
    let tr = solve_linear(a, |t| DMatrix::from_element(1, 1, l(t)), DVector::from_element(1, terminal), t_terminal)?;
    let nodes = tr
        .nodes()
        .iter()
        .map(|n| Node { t: n.t, y: n.y[0], dy: n.dy[0], left: n.left })
        .collect();
    Ok(StieltjesTrajectory::from_nodes(nodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leb_atom() -> DriverMeasure {
        DriverMeasure::lebesgue_with_atoms(1.0, &[(0.5, 1.0)]).unwrap()
    }

    #[test]
    fn pseudo_exponential_examples() {
        let leb = DriverMeasure::lebesgue(1.0).unwrap();
        assert_eq!(pseudo_exponential(&leb, |_| 0.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((pseudo_exponential(&leb, |_| 2.0, 0.0, 1.0).unwrap() - 7.389_056_098_930_65).abs() < 1e-12);
        let c = -0.4;
        let v = pseudo_exponential(&leb_atom(), |_| c, 0.0, 1.0).unwrap();
        assert!((v - c.exp() * (1.0 + c)).abs() < 1e-14);
    }

    #[test]
    fn pseudo_exponential_rejects_negative_factor() {
        let r = pseudo_exponential(&leb_atom(), |_| -2.0, 0.0, 1.0);
        assert!(matches!(r, Err(Error::PreconditionViolated(_))));
        // L ΔA = -1 is allowed and kills the solution
        assert_eq!(pseudo_exponential(&leb_atom(), |_| -1.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gronwall_examples() {
        let leb = DriverMeasure::lebesgue(1.0).unwrap();
        assert_eq!(gronwall_bound(&leb, 0.0, |_| 1.0, 0.0, 1.0).unwrap(), 0.0);
        assert!((gronwall_bound(&leb, 1.0, |_| 1.0, 0.0, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-14);
        let v = gronwall_bound(&leb_atom(), 0.1, |_| 2.0, 0.0, 1.0).unwrap();
        assert!((v - 0.1 * 4f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn solve_linear_scalar_examples() {
        let leb = DriverMeasure::lebesgue(1.0).unwrap();
        let tr = solve_linear_scalar(&leb, |_| 0.0, 1.0, 1.0).unwrap();
        assert!(tr.nodes().iter().all(|n| n.y == 1.0));
        let lam = 0.8;
        let tr = solve_linear_scalar(&leb, |_| lam, 2.0, 1.0).unwrap();
        for n in tr.nodes() {
            assert!((n.y - 2.0 * (lam * (1.0 - n.t)).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_matrix_matches_componentwise() {
        let a = DriverMeasure::lebesgue_with_atoms(2.0, &[(0.5, 1.0), (1.5, 0.5)]).unwrap();
        let l1 = |t: f64| 0.3 + t;
        let l2 = |t: f64| -0.2 * t;
        let tr = solve_linear(
            &a,
            |t| DMatrix::from_diagonal(&DVector::from_vec(vec![l1(t), l2(t)])),
            DVector::from_vec(vec![1.0, 2.0]),
            2.0,
        )
        .unwrap();
        for t in tr.breakpoints() {
            let g = tr.at_node(t).unwrap();
            let e1 = pseudo_exponential(&a, l1, t, 2.0).unwrap();
            let e2 = pseudo_exponential(&a, l2, t, 2.0).unwrap();
            assert!((g[0] - e1).abs() < 1e-12 * e1.abs());
            assert!((g[1] - 2.0 * e2).abs() < 1e-12 * e2.abs());
        }
    }

    #[test]
    fn non_commuting_matrix_against_ode() {
        use crate::ode::{dopri5, OdeOptions};
        let a = DriverMeasure::lebesgue(1.0).unwrap();
        let l = |t: f64| DMatrix::from_row_slice(2, 2, &[0.0, 1.0 + t, -1.0, 0.5 * t]);
        let tr = solve_linear(&a, l, DVector::from_vec(vec![1.0, 0.0]), 1.0).unwrap();
        let mut f = |t: f64, y: &Vec<f64>| {
            let g = DVector::from_vec(y.clone());
            Ok((-(l(t) * g)).as_slice().to_vec())
        };
        let opts = OdeOptions { atol: 1e-14, rtol: 1e-13, max_steps: 1_000_000 };
        let end = dopri5(&mut f, 1.0, vec![1.0, 0.0], 0.0, &opts, None, &mut |_, _, _| Ok(false)).unwrap();
        let g0 = tr.at_node(0.0).unwrap();
        assert!((g0[0] - end.y[0]).abs() < 1e-10 && (g0[1] - end.y[1]).abs() < 1e-10, "{g0:?} {:?}", end.y);
    }
}
