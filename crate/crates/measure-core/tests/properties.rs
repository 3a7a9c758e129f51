use ajk_measure::{
    pseudo_exponential, solve_backward, solve_linear_scalar, Density, DriverMeasure, OdeOptions,
    ScalarEquation, Segment,
};
use proptest::prelude::*;

fn driver_strategy() -> impl Strategy<Value = DriverMeasure> {
    (
        1.0f64..3.0,
        0.0f64..2.0,
        0.0f64..2.0,
        0.2f64..0.8,
        prop::collection::vec((0.05f64..0.95, 0.1f64..1.5), 0..4),
    )
        .prop_map(|(horizon, d1, d2, split, atoms)| {
            let mut atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(u, m)| (u * horizon, m)).collect();
            atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            atoms.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-6);
            let segments = vec![
                Segment { t0: 0.0, t1: split * horizon, density: Density::constant(d1) },
                Segment { t0: split * horizon, t1: horizon, density: Density::poly(vec![d2, 0.5]) },
            ];
            DriverMeasure::new(
                segments,
                atoms.iter().map(|&(t, da)| ajk_measure::Atom { t, da }).collect(),
            )
            .unwrap()
        })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_is_additive(a in driver_strategy(), u in 0.0f64..1.0, v in 0.0f64..1.0, k in 0.5f64..3.0) {
        let h = a.horizon();
        let (s, t) = if u < v { (u * h, v * h) } else { (v * h, u * h) };
        let g = |r: f64| (k * r).sin() + 2.0;
        let whole: f64 = a.integrate(g, 0.0, h).unwrap();
        let parts: f64 = a.integrate(g, 0.0, s).unwrap() + a.integrate(g, s, t).unwrap() + a.integrate(g, t, h).unwrap();
        prop_assert!(rel_close(whole, parts, 1e-12), "{whole} vs {parts}");
    }

    #[test]
    fn atoms_only_count_at_right_end_point(a in driver_strategy(), eps in 1e-6f64..1e-3) {
        for atom in a.atoms() {
            let g = |r: f64| 1.0 + r;
            let lo = (atom.t - eps).max(0.0);
            let left: f64 = a.integrate(g, lo, atom.t).unwrap();
            let cont: f64 = a.integrate_continuous(g, lo, atom.t).unwrap();
            prop_assert!((left - cont - g(atom.t) * atom.da).abs() < 1e-12);
            let hi = (atom.t + eps).min(a.horizon());
            let right: f64 = a.integrate(g, atom.t, hi).unwrap();
            let cont: f64 = a.integrate_continuous(g, atom.t, hi).unwrap();
            prop_assert!((right - cont).abs() < 1e-15);
        }
    }

    #[test]
    fn pseudo_exponential_cocycle(a in driver_strategy(), u in 0.0f64..1.0, v in 0.0f64..1.0, c in -0.45f64..1.0) {
        let h = a.horizon();
        let (t, r) = if u < v { (u * h, v * h) } else { (v * h, u * h) };
        let l = |s: f64| c * (1.0 + 0.1 * s.cos());
        let whole = pseudo_exponential(&a, l, t, h).unwrap();
        let split = pseudo_exponential(&a, l, t, r).unwrap() * pseudo_exponential(&a, l, r, h).unwrap();
        prop_assert!(rel_close(whole, split, 1e-12), "{whole} vs {split}");
    }

    #[test]
    fn solve_linear_matches_pseudo_exponential(a in driver_strategy(), c in -0.4f64..1.0, g_t in 0.1f64..3.0) {
        let h = a.horizon();
        let l = |s: f64| c + 0.2 * (3.0 * s).sin();
        let tr = solve_linear_scalar(&a, l, g_t, h).unwrap();
        for t in tr.breakpoints() {
            let expected = g_t * pseudo_exponential(&a, l, t, h).unwrap();
            prop_assert!(rel_close(*tr.at_node(t).unwrap(), expected, 1e-12));
        }
    }

    #[test]
    fn comparison_property(
        a in driver_strategy(),
        p in -1.0f64..1.0, q in -0.2f64..0.2, r in -0.2f64..0.2,
        d0 in 0.0f64..0.5, d1 in 0.0f64..0.5, f_t in -1.0f64..1.0, gap in 0.0f64..0.5,
    ) {
        let h = a.horizon();
        let f = move |t: f64, y: f64| p + q * y + r * (y + t).sin();
        let g = move |t: f64, y: f64| f(t, y) + d0 + d1 * (t * y).cos().powi(2);
        let opts = OdeOptions::default();
        let sf = solve_backward(&a, &ScalarEquation { f }, f_t, h, 0.0, &[], &opts).unwrap();
        let breaks = sf.trajectory.breakpoints();
        let sg = solve_backward(&a, &ScalarEquation { f: g }, f_t + gap, h, 0.0, &breaks, &opts).unwrap();
        for t in breaks {
            let (yf, yg) = (*sf.trajectory.at_node(t).unwrap(), *sg.trajectory.at_node(t).unwrap());
            prop_assert!(yf <= yg + 1e-10, "t={t}: {yf} > {yg}");
        }
    }
}
