//! Dormand–Prince 5(4) with FSAL and standard step-size control.
//!
//! Integration may run forward or backward in time; the sign of `t1 - t0` decides.

use crate::error::{Error, Result};
use crate::vector::VectorSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-11, rtol: 1e-9, max_steps: 1_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Outcome of one call to [`dopri5`].
#[derive(Debug, Clone)]
pub struct OdeEnd<V> {
    pub y: V,
    pub dy: V,
    pub h_next: f64,
    pub steps: usize,
}

fn combo<V: VectorSpace>(y: &V, h: f64, coeffs: &[f64], ks: &[V]) -> V {
    let mut out = y.clone();
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            out.axpy(h * c, k);
        }
    }
    out
}

fn initial_step<V, F>(f: &mut F, t0: f64, y0: &V, f0: &V, dir: f64, span: f64, o: &OdeOptions) -> Result<f64>
where
    V: VectorSpace,
    F: FnMut(f64, &V) -> Result<V>,
{
    let d0 = V::scaled_error(y0, y0, y0, o.atol, o.rtol);
    let d1 = V::scaled_error(f0, y0, y0, o.atol, o.rtol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let y1 = combo(y0, dir * h0, &[1.0], std::slice::from_ref(f0));
    let f1 = f(t0 + dir * h0, &y1)?;
    let mut df = f1.clone();
    df.axpy(-1.0, f0);
    let d2 = V::scaled_error(&df, y0, y0, o.atol, o.rtol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`.
///
/// `observe(t, y, dy)` is called after every accepted step and may modify `y` (for example
/// to project onto a constraint set); when it returns `true` the derivative is recomputed.
pub fn dopri5<V, F, O>(
    f: &mut F,
    t0: f64,
    y0: V,
    t1: f64,
    opts: &OdeOptions,
    h_guess: Option<f64>,
    observe: &mut O,
) -> Result<OdeEnd<V>>
where
    V: VectorSpace,
    F: FnMut(f64, &V) -> Result<V>,
    O: FnMut(f64, &mut V, &V) -> Result<bool>,
{
    let mut k1 = f(t0, &y0)?;
    if t1 == t0 {
        return Ok(OdeEnd { y: y0, dy: k1, h_next: h_guess.unwrap_or(0.0), steps: 0 });
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut h = match h_guess {
        Some(h) if h > 0.0 => h.min(span),
        _ => initial_step(f, t0, &y0, &k1, dir, span, opts)?,
    };
    let mut t = t0;
    let mut y = y0;
    let mut steps = 0;
    let mut rejected_last = false;
    loop {
        let remaining = (t1 - t).abs();
        let last = h >= remaining * (1.0 - 1e-12);
        let hs = if last { remaining } else { h };
        let hd = dir * hs;
        let k2 = f(t + C[1] * hd, &combo(&y, hd, &A2, std::slice::from_ref(&k1)))?;
        let k3 = f(t + C[2] * hd, &combo(&y, hd, &A3, &[k1.clone(), k2.clone()]))?;
        let k4 = f(t + C[3] * hd, &combo(&y, hd, &A4, &[k1.clone(), k2.clone(), k3.clone()]))?;
        let ks4 = [k1.clone(), k2.clone(), k3.clone(), k4.clone()];
        let k5 = f(t + C[4] * hd, &combo(&y, hd, &A5, &ks4))?;
        let ks5 = [k1.clone(), k2.clone(), k3.clone(), k4.clone(), k5.clone()];
        let k6 = f(t + C[5] * hd, &combo(&y, hd, &A6, &ks5))?;
        let ks6 = [k1.clone(), k2, k3, k4, k5, k6];
        let y_new = combo(&y, hd, &B, &ks6);
        let t_new = if last { t1 } else { t + hd };
        let k7 = f(t_new, &y_new)?;
        let mut err_vec = y.zeros_like();
        for (e, k) in E.iter().zip(ks6.iter().chain(std::iter::once(&k7))) {
            if *e != 0.0 {
                err_vec.axpy(hd * e, k);
            }
        }
        let err = V::scaled_error(&err_vec, &y, &y_new, opts.atol, opts.rtol);
        if !err.is_finite() {
            h = hs * 0.1;
            rejected_last = true;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }
        let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
        fac = fac.clamp(0.2, 10.0);
        if err <= 1.0 {
            steps += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            if observe(t, &mut y, &k1)? {
                k1 = f(t, &y)?;
            }
            if rejected_last {
                fac = fac.min(1.0);
            }
            rejected_last = false;
            let h_next = hs * fac;
            if last {
                return Ok(OdeEnd { y, dy: k1, h_next: h_next.max(h), steps });
            }
            h = h_next;
        } else {
            rejected_last = true;
            h = hs * fac.min(1.0);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        if steps > opts.max_steps {
            return Err(Error::StepSizeUnderflow { t });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn no_obs<V>(_: f64, _: &mut V, _: &V) -> Result<bool> {
        Ok(false)
    }

    #[test]
    fn exponential_backward() {
        let mut f = |_t: f64, y: &f64| Ok(-2.0 * y);
        let end = dopri5(&mut f, 1.0, 1.0, 0.0, &OdeOptions::default(), None, &mut no_obs).unwrap();
        assert!((end.y - 2f64.exp()).abs() < 1e-8 * 2f64.exp());
    }

    #[test]
    fn complex_rotation() {
        let mut f = |_t: f64, y: &Vec<Complex64>| Ok(vec![y[0] * Complex64::new(0.0, 1.0)]);
        let end = dopri5(
            &mut f,
            0.0,
            vec![Complex64::new(1.0, 0.0)],
            10.0,
            &OdeOptions::default(),
            None,
            &mut no_obs,
        )
        .unwrap();
        let exact = Complex64::new(0.0, 10.0).exp();
        assert!((end.y[0] - exact).norm() < 1e-8);
    }

    #[test]
    fn riccati_blows_up_in_finite_time() {
        // y' = y^2, y(0)=1 explodes at t=1
        let mut f = |_t: f64, y: &f64| Ok(y * y);
        let mut cap = |t: f64, y: &mut f64, _: &f64| {
            if y.abs() > 1e8 {
                Err(Error::BlowUp { t, norm: y.abs() })
            } else {
                Ok(false)
            }
        };
        let r = dopri5(&mut f, 0.0, 1.0, 2.0, &OdeOptions::default(), None, &mut cap);
        assert!(matches!(r, Err(Error::BlowUp { .. })));
    }
}
