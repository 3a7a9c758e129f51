// Hand-built admissibility fixtures: each names the exact set of clauses expected to fail.

use std::sync::Arc;

use ajk_lk::admissible::clause::*;
use ajk_lk::{
    AffineParameterSet, EnhancedJump, GammaSpec, JumpComponent, JumpMeasureSpec, NumericDensity, Outcome,
    StateSpaceShape, TableJump,
};
use ajk_measure::DriverMeasure;
use num_complex::Complex64;

pub struct Fixture {
    pub name: &'static str,
    pub params: AffineParameterSet,
    pub fails: Vec<&'static str>,
}

fn base(m: usize, n: usize) -> AffineParameterSet {
    let a = DriverMeasure::lebesgue_with_atoms(2.0, &[(1.0, 0.5)]).unwrap();
    AffineParameterSet::zero(StateSpaceShape::new(m, n).unwrap(), a)
}

fn enhanced(m: usize, n: usize, e: EnhancedJump) -> AffineParameterSet {
    base(m, n).with_gamma(1.0, GammaSpec::Enhanced(e))
}

fn fx(name: &'static str, params: AffineParameterSet, fails: &[&'static str]) -> Fixture {
    Fixture { name, params, fails: fails.to_vec() }
}

pub fn fixtures() -> Vec<Fixture> {
    let pm = |x: Vec<f64>, w: f64| JumpMeasureSpec::point_mass(x, w);
    let c0 = Complex64::new(0.0, 0.0);
    vec![
        fx("all-zero parameters", base(1, 1), &[]),
        fx("CIR type", base(1, 0).with_beta(0, 0, 0.2).with_beta(1, 0, -0.8).with_alpha(1, 0, 0, 0.09), &[]),
        fx(
            "compensated Poisson drift",
            base(1, 0).with_beta(0, 0, 1.5).with_mu(0, pm(vec![1.0], 1.5)),
            &[],
        ),
        fx(
            "exponential jumps with enough drift",
            base(1, 0)
                .with_beta(0, 0, 1.0)
                .with_mu(0, JumpMeasureSpec::new(vec![JumpComponent::Exponential { rate: 2.0, axis: 1, weight: 1.0 }])),
            &[],
        ),
        fx("diffusion on real coordinate index", base(0, 1).with_alpha(1, 0, 0, 0.5), &[ALPHA_J]),
        fx("alpha_0 charges positive block", base(1, 0).with_alpha(0, 0, 0, 0.5), &[ALPHA0_II]),
        fx("alpha_1 charges other positive coordinate", base(2, 0).with_alpha(1, 1, 1, 0.5), &[ALPHA_I_OFF]),
        fx("indefinite alpha_0", base(0, 1).with_alpha(0, 0, 0, -1.0), &[ALPHA_PSD]),
        fx("negative constant drift", base(1, 1).with_beta(0, 0, -0.1), &[BETA0_D]),
        fx("compensator exceeds constant drift", base(1, 0).with_beta(0, 0, 0.5).with_mu(0, pm(vec![1.0], 1.0)), &[BETA0_D]),
        fx("real state drives positive coordinate", base(1, 1).with_beta(2, 0, 0.3), &[BETA_IJ]),
        fx("negative cross drift", base(2, 0).with_beta(2, 0, -0.2), &[BETA_I_OFF]),
        fx(
            "cross drift below compensator",
            base(2, 0).with_beta(2, 0, 0.1).with_mu(2, pm(vec![0.5, 0.0], 1.0)),
            &[BETA_I_OFF],
        ),
        fx("jump into negative half-line", base(1, 0).with_mu(0, pm(vec![-0.5], 1.0)), &[MU_SUPPORT]),
        fx("jump measure on real coordinate index", base(0, 1).with_mu(1, pm(vec![0.5], 1.0)), &[MU_J]),
        fx(
            "non-integrable small jumps",
            base(1, 0).with_mu(
                0,
                JumpMeasureSpec::new(vec![JumpComponent::Numeric {
                    density: NumericDensity { f: Arc::new(|x: &[f64]| x[0].powi(-3)), lo: vec![0.0], hi: vec![1.0] },
                    weight: 1.0,
                }]),
            ),
            &[M_FINITE, BETA0_D, INTEGRABLE],
        ),
        fx(
            "atom: identity-preserving scaling",
            enhanced(1, 0, EnhancedJump { beta: vec![vec![0.0], vec![-0.5]], ..Default::default() }),
            &[],
        ),
        fx(
            "atom: diffusive jump on positive block",
            enhanced(1, 0, EnhancedJump { alpha: vec![vec![vec![1.0]]], ..Default::default() }),
            &[ATOM_ALPHA_II],
        ),
        fx(
            "atom: indefinite alpha",
            enhanced(0, 1, EnhancedJump { alpha: vec![vec![vec![-1.0]]], ..Default::default() }),
            &[ATOM_ALPHA_PSD],
        ),
        fx(
            "atom: state-dependent diffusion on real index",
            enhanced(0, 1, EnhancedJump { alpha: vec![vec![vec![0.0]], vec![vec![1.0]]], ..Default::default() }),
            &[ATOM_ALPHA_J],
        ),
        fx(
            "atom: negative constant jump",
            enhanced(1, 0, EnhancedJump { beta: vec![vec![-0.3], vec![0.0]], ..Default::default() }),
            &[ATOM_BETA0_D],
        ),
        fx(
            "atom: overshooting mean reversion",
            enhanced(1, 0, EnhancedJump { beta: vec![vec![0.0], vec![-1.5]], ..Default::default() }),
            &[ATOM_BETA_II],
        ),
        fx(
            "atom: real state feeds positive coordinate",
            enhanced(1, 1, EnhancedJump { beta: vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![0.2, 0.0]], ..Default::default() }),
            &[ATOM_BETA_IJ],
        ),
        fx(
            "atom: jump measure on real index",
            enhanced(0, 1, EnhancedJump { mu: vec![JumpMeasureSpec::empty(), pm(vec![0.3], 1.0)], ..Default::default() }),
            &[ATOM_MU_J],
        ),
        fx(
            "atom: jump out of D",
            enhanced(1, 0, EnhancedJump { mu: vec![pm(vec![-0.3], 1.0)], ..Default::default() }),
            &[ATOM_MU_SUPPORT],
        ),
        fx(
            "atom: valid Bernoulli table",
            base(1, 0).with_gamma(
                1.0,
                GammaSpec::Table(TableJump {
                    outcomes: vec![Outcome { p: 0.4, x: vec![0.0] }, Outcome { p: 0.6, x: vec![1.0] }],
                    linear: Some(vec![vec![0.5]]),
                }),
            ),
            &[],
        ),
        fx(
            "atom: table with negative outcome",
            base(1, 0).with_gamma(1.0, GammaSpec::Table(TableJump { outcomes: vec![Outcome { p: 1.0, x: vec![-1.0] }], linear: None })),
            &[ATOM_TABLE],
        ),
        fx(
            "atom: table flipping sign",
            base(1, 0).with_gamma(
                1.0,
                GammaSpec::Table(TableJump { outcomes: vec![Outcome { p: 1.0, x: vec![0.0] }], linear: Some(vec![vec![-1.0]]) }),
            ),
            &[ATOM_TABLE],
        ),
        fx(
            "atom: black box not normalised",
            base(0, 1).with_gamma(1.0, GammaSpec::black_box(move |_u| Ok((Complex64::new(0.1, 0.0), vec![c0])))),
            &[ATOM_GAMMA_ZERO],
        ),
    ]
}
