// Catalog instances and random (s, T, u) draws shared by the solver agreement tests.

use ajk_models::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub model: ModelSpec,
    /// Largest |Im u_k| drawn.
    pub im_max: f64,
    /// Largest -Re u_k drawn on the nonnegative coordinates.
    pub re_max: f64,
}

fn case(model: ModelSpec, im_max: f64, re_max: f64) -> Case {
    Case { model, im_max, re_max }
}

pub fn catalog() -> Vec<Case> {
    vec![
        case(discrete_poisson(&[0.3, 0.55, 0.1, 0.8, 0.45, 0.25]).unwrap(), 3.0, 0.5),
        case(poisson(1.3, 3.0).unwrap(), 3.0, 0.5),
        // cos θ stays away from zero for |θ| < π/2
        case(poisson_with_normal_jump(1.5, 1.2, 3.0).unwrap(), 1.4, 0.0),
        case(vasicek(0.01, -0.5, 0.2, 3.0).unwrap(), 3.0, 0.0),
        case(discontinuous_vasicek(0.02, -0.7, 0.15, 0.25, &[0.5, 1.25, 2.0], 3.0).unwrap(), 3.0, 0.0),
        case(vasicek_hjm_state(0.03, -0.6, 0.1, 0.2, &[1.0, 2.0], 3.0).unwrap(), 2.0, 0.0),
        case(cir_type(0.9, 0.3, 0.1, 3.0).unwrap(), 3.0, 0.5),
        case(ar1_gaussian(&[0.9, -0.4, 1.1, 0.5, 0.7, -1.2], 0.3).unwrap(), 2.0, 0.0),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn draw_u(c: &Case, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let shape = &c.model.params.shape;
    (0..shape.d())
        .map(|k| {
            let re = if k < shape.m { -rng.random_range(0.0..=c.re_max) } else { 0.0 };
            Complex64::new(re, rng.random_range(-c.im_max..c.im_max))
        })
        .collect()
}

/// `0 <= s <= T <= horizon`.
pub fn draw_times(c: &Case, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let h = c.model.horizon();
    let a: f64 = rng.random_range(0.0..h);
    let b: f64 = rng.random_range(0.0..h);
    (a.min(b), a.max(b))
}

pub fn max_dev(a: &(Complex64, Vec<Complex64>), b: &(Complex64, Vec<Complex64>)) -> f64 {
    a.1.iter().zip(&b.1).fold((a.0 - b.0).norm(), |m, (x, y)| m.max((x - y).norm()))
}
