//! Globally adaptive 7/15-point Gauss–Kronrod quadrature over a generic vector space.
//!
//! The interval with the largest error estimate is bisected until
//!
//! ```text
//! sum(err) <= max(abs_tol, rel_tol * |I|)
//! ```
//!
//! Nodes are interior, so integrands may jump at the end points.

use crate::error::{Error, Result};
use crate::vector::VectorSpace;

pub const ABS_TOL: f64 = 1e-12;
pub const REL_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

fn gk15<V: VectorSpace, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc.zeros_like();
    let mut g = fc.zeros_like();
    k.axpy(WGK[7], &fc);
    g.axpy(WG[3], &fc);
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k.axpy(WGK[j], &f1);
        k.axpy(WGK[j], &f2);
        if j % 2 == 1 {
            g.axpy(WG[j / 2], &f1);
            g.axpy(WG[j / 2], &f2);
        }
    }
    k.scale(h);
    g.scale(h);
    let mut diff = k.clone();
    diff.axpy(-1.0, &g);
    (k, diff.max_abs())
}

/// Integrates `f` over `[a, b]` to the default tolerances.
pub fn integrate<V: VectorSpace, F: FnMut(f64) -> V>(f: F, a: f64, b: f64) -> Result<V> {
    integrate_tol(f, a, b, ABS_TOL, REL_TOL)
}

pub fn integrate_tol<V: VectorSpace, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<V> {
    let (v0, e0) = gk15(&mut f, a, b);
    if a == b {
        return Ok(v0.zeros_like());
    }
    let mut pieces = vec![Piece { a, b, value: v0, err: e0 }];
    loop {
        let mut total = pieces[0].value.zeros_like();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in pieces.iter().enumerate() {
            total.axpy(1.0, &p.value);
            err += p.err;
            if p.err > pieces[worst].err {
                worst = i;
            }
        }
        if err.is_nan() {
            return Err(Error::QuadratureFailure { a, b, err });
        }
        if err <= abs_tol.max(rel_tol * total.max_abs()) {
            return Ok(total);
        }
        let p = &pieces[worst];
        let m = 0.5 * (p.a + p.b);
        if pieces.len() >= MAX_INTERVALS || m <= p.a || m >= p.b {
            return Err(Error::QuadratureFailure { a, b, err });
        }
        let (pa, pb) = (p.a, p.b);
        let (vl, el) = gk15(&mut f, pa, m);
        let (vr, er) = gk15(&mut f, m, pb);
        pieces[worst] = Piece { a: pa, b: m, value: vl, err: el };
        pieces.push(Piece { a: m, b: pb, value: vr, err: er });
    }
}
