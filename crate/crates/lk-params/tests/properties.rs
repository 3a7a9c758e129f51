use ajk_lk::{
    check_admissible, growth_constant, levy_khintchine_exponent, AffineParameterSet, JumpComponent, JumpMeasureSpec,
    StateSpaceShape,
};
use ajk_measure::DriverMeasure;
use num_complex::Complex64;
use proptest::prelude::*;

fn component() -> impl Strategy<Value = JumpComponent> {
    prop_oneof![
        (0.05f64..3.0, 0.1f64..2.0, -2.0f64..2.0).prop_map(|(x, w, y)| JumpComponent::PointMass { x: vec![x, y], weight: w }),
        (0.5f64..4.0, 0.1f64..2.0).prop_map(|(rate, w)| JumpComponent::Exponential { rate, axis: 1, weight: w }),
        (-1.0f64..1.0, 0.05f64..1.0, 0.1f64..2.0).prop_map(|(m, v, w)| JumpComponent::Gaussian {
            mean: vec![0.0, m],
            cov: vec![vec![0.0, 0.0], vec![0.0, v]],
            weight: w,
            restricted: false,
        }),
    ]
}

fn triplet() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, JumpMeasureSpec)> {
    (
        prop::collection::vec(-2.0f64..2.0, 2),
        0.0f64..1.0,
        0.0f64..1.0,
        -0.5f64..0.5,
        prop::collection::vec(component(), 0..3),
    )
        .prop_map(|(b, a11, a22, rho, comps)| {
            let off = rho * (a11 * a22).sqrt();
            (b, vec![vec![a11, off], vec![off, a22]], JumpMeasureSpec::new(comps))
        })
}

fn u_strategy() -> impl Strategy<Value = Vec<Complex64>> {
    (-1.5f64..0.0, -4.0f64..4.0, -4.0f64..4.0).prop_map(|(x, y, z)| vec![Complex64::new(x, y), Complex64::new(0.0, z)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exponent_vanishes_at_zero((b, a, mu) in triplet()) {
        let s = StateSpaceShape::new(1, 1).unwrap();
        let zero = [Complex64::new(0.0, 0.0); 2];
        prop_assert_eq!(levy_khintchine_exponent(&s, &b, &a, &mu, 0.0, &zero).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hermitian_symmetry((b, a, mu) in triplet(), u in u_strategy()) {
        let s = StateSpaceShape::new(1, 1).unwrap();
        let uc: Vec<_> = u.iter().map(|z| z.conj()).collect();
        let v = levy_khintchine_exponent(&s, &b, &a, &mu, 0.0, &u).unwrap();
        let w = levy_khintchine_exponent(&s, &b, &a, &mu, 0.0, &uc).unwrap();
        prop_assert!((v.conj() - w).norm() <= 1e-12 * (1.0 + v.norm()));
    }

    #[test]
    fn growth_bound_on_admissible_sets(
        b0 in 0.0f64..1.0, b11 in -2.0f64..2.0, b12 in 0.0f64..1.0, b22 in -1.0f64..1.0,
        a11 in 0.0f64..1.0, a12 in -0.3f64..0.3, a22 in 0.3f64..1.0,
        comps in prop::collection::vec(component(), 0..3),
        u in u_strategy(), t in 0.0f64..2.0,
    ) {
        // m = 1, n = 1: α_1 may couple the real coordinate, β_2 must not feed the positive one
        let a12 = a12.clamp(-(a11 * a22).sqrt(), (a11 * a22).sqrt());
        let p = AffineParameterSet::zero(StateSpaceShape::new(1, 1).unwrap(), DriverMeasure::lebesgue(2.0).unwrap())
            .with_beta(0, 0, b0)
            .with_beta(1, 0, b11)
            .with_beta(1, 1, b12)
            .with_beta(2, 1, b22)
            .with_alpha(1, 0, 0, a11)
            .with_alpha(1, 0, 1, a12)
            .with_alpha(1, 1, 1, a22)
            .with_alpha(0, 1, 1, 0.2)
            .with_mu(1, JumpMeasureSpec::new(comps));
        prop_assert!(check_admissible(&p).passed(), "{}", check_admissible(&p));
        let c = growth_constant(&p, t, 1).unwrap();
        let x = u[0].re;
        let re = p.r_eval(t, &u).unwrap()[0].re;
        prop_assert!(re <= c * (x * x - x) + 1e-12, "{} > {}", re, c * (x * x - x));
    }
}
