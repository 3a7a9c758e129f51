use ajk_lk::{AffineParameterSet, GammaSpec, JumpMeasureSpec, StateSpaceShape, TableJump, Outcome};
use ajk_measure::DriverMeasure;
use ajk_riccati::{char_fn, error_estimate, solve_backward, solve_backward_with, RiccatiOptions};
use num_complex::Complex64;
use proptest::prelude::*;

type C = Complex64;

/// CIR-type positive factor with Poisson jumps coupled to a Gaussian real factor, plus a
/// Bernoulli jump of the positive factor at an atom.
fn model(kappa: f64, s2: f64, lam: f64, b22: f64, p: f64, atom: f64) -> AffineParameterSet {
    let a = DriverMeasure::lebesgue_with_atoms(2.0, &[(atom, 1.0)]).unwrap();
    let table = TableJump {
        outcomes: vec![Outcome { p, x: vec![1.0, 0.0] }, Outcome { p: 1.0 - p, x: vec![0.0, 0.0] }],
        linear: None,
    };
    AffineParameterSet::zero(StateSpaceShape::new(1, 1).unwrap(), a)
        .with_beta(0, 0, 0.2 + lam)
        .with_beta(1, 0, -kappa)
        .with_beta(1, 1, 0.3)
        .with_beta(2, 1, b22)
        .with_alpha(1, 0, 0, s2)
        .with_alpha(0, 1, 1, 0.1)
        .with_mu(0, JumpMeasureSpec::point_mass(vec![1.0, 0.0], lam))
        .with_gamma(atom, GammaSpec::Table(table))
}

fn params() -> impl Strategy<Value = AffineParameterSet> {
    (0.0f64..2.0, 0.0f64..1.0, 0.0f64..2.0, -1.0f64..0.5, 0.05f64..0.95, 0.2f64..1.8)
        .prop_map(|(k, s2, lam, b22, p, atom)| model(k, s2, lam, b22, p, atom))
}

fn imaginary_u() -> impl Strategy<Value = Vec<C>> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(a, b)| vec![C::new(0.0, a), C::new(0.0, b)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characteristic_function_is_bounded(p in params(), u in imaginary_u(), x0 in 0.0f64..3.0, x1 in -3.0f64..3.0, t in 0.1f64..2.0) {
        let sol = solve_backward(&p, t, &u).unwrap();
        for s in [0.0, 0.5 * t, t] {
            let v = char_fn(&sol, s, &[x0, x1]).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-9, "|E e^<u,X>| = {}", v.norm());
        }
    }

    #[test]
    fn psi_stays_in_u(p in params(), u in imaginary_u(), t in 0.1f64..2.0) {
        let sol = solve_backward(&p, t, &u).unwrap();
        for n in sol.trajectory.nodes() {
            prop_assert!(n.y[1].re <= 1e-9, "Re ψ_1 = {}", n.y[1].re);
            prop_assert!(n.y[2].re.abs() <= 1e-9, "Re ψ_2 = {}", n.y[2].re);
        }
    }

    #[test]
    fn zero_argument_gives_zero(p in params(), t in 0.1f64..2.0) {
        let z = [C::new(0.0, 0.0); 2];
        let sol = solve_backward(&p, t, &z).unwrap();
        let (phi, psi) = sol.at(0.0).unwrap();
        prop_assert!(phi.norm() < 1e-14 && psi.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn deterministic(p in params(), u in imaginary_u()) {
        let a = solve_backward(&p, 2.0, &u).unwrap();
        let b = solve_backward(&p, 2.0, &u).unwrap();
        prop_assert_eq!(a.trajectory.nodes().len(), b.trajectory.nodes().len());
        for (x, y) in a.trajectory.nodes().iter().zip(b.trajectory.nodes()) {
            prop_assert_eq!(x.t.to_bits(), y.t.to_bits());
            prop_assert_eq!(&x.y, &y.y);
        }
    }
}

#[test]
fn tightening_tolerances_converges() {
    let p = model(1.1, 0.6, 1.5, -0.4, 0.3, 0.7);
    let u = [C::new(-0.2, 2.5), C::new(0.0, -1.5)];
    let loose = RiccatiOptions { ode: ajk_measure::OdeOptions { atol: 1e-7, rtol: 1e-5, ..Default::default() }, ..Default::default() };
    let e_loose = error_estimate(&p, 2.0, &u, &loose).unwrap();
    let e_tight = error_estimate(&p, 2.0, &u, &RiccatiOptions::default()).unwrap();
    assert!(e_tight < e_loose, "{e_tight:e} vs {e_loose:e}");
    assert!(e_tight < 1e-8);
    let reference = solve_backward_with(&p, 2.0, &u, 0.0, &RiccatiOptions {
        ode: ajk_measure::OdeOptions { atol: 1e-14, rtol: 1e-12, ..Default::default() },
        ..Default::default()
    })
    .unwrap();
    let default = solve_backward(&p, 2.0, &u).unwrap();
    assert!((reference.phi(0.0).unwrap() - default.phi(0.0).unwrap()).norm() < 1e-8);
}
