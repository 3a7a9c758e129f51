//! Minimal vector-space abstraction shared by the quadrature and ODE routines.

use num_complex::Complex64;

pub trait VectorSpace: Clone {
    /// Zero element with the same shape as `self`.
    fn zeros_like(&self) -> Self;
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    /// Largest absolute component.
    fn max_abs(&self) -> f64;
    /// Componentwise `max |e_k| / (atol + rtol * max(|y0_k|, |y1_k|))`.
    fn scaled_error(e: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;

    fn scale(&mut self, a: f64) {
        let z = self.zeros_like();
        let mut out = z;
        out.axpy(a, self);
        *self = out;
    }
}

impl VectorSpace for f64 {
    fn zeros_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn scaled_error(e: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        e.abs() / (atol + rtol * y0.abs().max(y1.abs()))
    }
}

impl VectorSpace for Complex64 {
    fn zeros_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
    fn scaled_error(e: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        e.norm() / (atol + rtol * y0.norm().max(y1.norm()))
    }
}

impl<T: VectorSpace> VectorSpace for Vec<T> {
    fn zeros_like(&self) -> Self {
        self.iter().map(|x| x.zeros_like()).collect()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (s, xi) in self.iter_mut().zip(x) {
            s.axpy(a, xi);
        }
    }
    fn max_abs(&self) -> f64 {
        self.iter().map(|x| x.max_abs()).fold(0.0, f64::max)
    }
    fn scaled_error(e: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        e.iter()
            .zip(y0)
            .zip(y1)
            .map(|((e, a), b)| T::scaled_error(e, a, b, atol, rtol))
            .fold(0.0, f64::max)
    }
}
