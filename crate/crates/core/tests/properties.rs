use std::f64::consts::PI;

use proptest::prelude::*;

use cp2_willmore::cp2::normalize;
use cp2_willmore::cvec::{mat, Cx, C64, V3};
use cp2_willmore::geometry::{geometry_at, identity_residuals};
use cp2_willmore::invariants::invariant_report;
use cp2_willmore::quadrature::build_grid;
use cp2_willmore::torus_opt::{params_from_weights, weights_from_params};
use cp2_willmore::twistor::{numeric_lift, pgl_act, project_pair, unitary_from, TwistorPair};
use cp2_willmore::variational::el_residual;
use cp2_willmore::variational::Functional;
use cp2_willmore::zoo::parse_complex;
use cp2_willmore::{make_surface, ChartPoint, Domain, FamilySpec, Immersion};

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Cx::new(a, b))
}

fn nonzero_pair() -> impl Strategy<Value = (C64, C64)> {
    (complex(), complex()).prop_filter("away from zero", |(a, b)| a.norm_sqr() + b.norm_sqr() > 0.05)
}

/// Sphere point away from both poles.
fn sphere_point() -> impl Strategy<Value = ChartPoint> {
    (-0.95..0.95f64, 0.0..2.0 * PI).prop_map(|(c, phi)| ChartPoint::polar(c.acos(), phi))
}

fn surface_spec() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (0.0..2.5f64).prop_map(|t| FamilySpec::Whitney { t }),
        nonzero_pair().prop_map(|(a, b)| FamilySpec::PhiAb { a, b }),
        nonzero_pair()
            .prop_filter("unbranched ψ", |(a, b)| a.abs() > 0.2 && b.abs() > 0.2)
            .prop_map(|(a, b)| FamilySpec::Psi { a, b }),
        Just(FamilySpec::DoublePoint),
        Just(FamilySpec::ComplexLine),
    ]
}

fn matrix() -> impl Strategy<Value = mat::M3> {
    proptest::collection::vec(complex(), 9).prop_map(|v| {
        let mut m = mat::identity();
        for (k, x) in v.into_iter().enumerate() {
            m[k / 3][k % 3] = m[k / 3][k % 3] + x.scale(0.2);
        }
        m
    })
}

fn vec3() -> impl Strategy<Value = V3> {
    (complex(), complex(), complex())
        .prop_filter("nonzero", |(a, b, c)| a.norm_sqr() + b.norm_sqr() + c.norm_sqr() > 0.1)
        .prop_map(|(a, b, c)| V3::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pointwise_identities_hold(spec in surface_spec(), p in sphere_point()) {
        let s = make_surface(spec.validated().unwrap()).unwrap();
        let r = identity_residuals(&geometry_at(&s, &p).unwrap());
        prop_assert!(r.kbar.abs() < 1e-9, "{spec}: {r:?}");
        prop_assert!(r.kbarperp.abs() < 1e-9, "{spec}: {r:?}");
        let scale = 1.0 + geometry_at(&s, &p).unwrap().h_sq();
        prop_assert!(r.sigma_plus.abs() < 1e-8 * scale, "{spec}: {r:?}");
        prop_assert!(r.sigma_minus.abs() < 1e-8 * scale, "{spec}: {r:?}");
        prop_assert!(r.kahler_angle < 1e-9, "{spec}: {r:?}");
        prop_assert!(r.frame < 1e-10, "{spec}: {r:?}");
    }

    #[test]
    fn kahler_function_is_bounded(spec in surface_spec(), p in sphere_point()) {
        let s = make_surface(spec.validated().unwrap()).unwrap();
        let c = geometry_at(&s, &p).unwrap().c;
        prop_assert!(c.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn lift_is_a_section(spec in surface_spec(), p in sphere_point()) {
        prop_assume!(!matches!(spec, FamilySpec::Whitney { t } if t == 0.0));
        let s = make_surface(spec.validated().unwrap()).unwrap();
        let pair = numeric_lift(&s, &p).unwrap();
        let phi = normalize(&s.eval(p.chart, p.x, p.y)).unwrap();
        prop_assert!(pair.incidence() < 1e-10);
        prop_assert!(project_pair(&pair).unwrap().distance(&phi) < 1e-8);
    }

    #[test]
    fn action_preserves_incidence(z in vec3(), w in vec3(), a in matrix()) {
        let z = z.normalized();
        let w = w.horizontal(&z);
        prop_assume!(w.norm() > 0.1);
        let pair = TwistorPair::from_reps(&z, &w).unwrap();
        if let Ok(q) = pgl_act(&a, &pair) {
            prop_assert!(q.incidence() < 1e-12);
        }
    }

    #[test]
    fn unitary_action_commutes_with_projection(z in vec3(), w in vec3(), g in matrix()) {
        let z = z.normalized();
        let w = w.horizontal(&z);
        prop_assume!(w.norm() > 0.1);
        let u = unitary_from(&g);
        let pair = TwistorPair::from_reps(&z, &w).unwrap();
        let lhs = project_pair(&pgl_act(&u, &pair).unwrap()).unwrap();
        let rhs = normalize(&project_pair(&pair).unwrap().rep().apply(&u)).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-9);
    }

    #[test]
    fn complex_numbers_parse(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let z = parse_complex(&format!("{re}{}{}i", if im < 0.0 { "-" } else { "+" }, im.abs())).unwrap();
        prop_assert_eq!((z.re, z.im), (re, im));
        let z = parse_complex(&format!("{re},{im}")).unwrap();
        prop_assert_eq!((z.re, z.im), (re, im));
    }

    #[test]
    fn simplex_parametrization_round_trips(a in 0.01..1.0f64, b in 0.01..1.0f64, c in 0.01..1.0f64) {
        let s = a + b + c;
        let w = [a / s, b / s, c / s];
        let back = weights_from_params(&params_from_weights(w).unwrap());
        for k in 0..3 {
            prop_assert!((back[k] - w[k]).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn willmore_is_mean_of_halves(spec in surface_spec()) {
        let s = make_surface(spec.validated().unwrap()).unwrap();
        let g = build_grid(Domain::Sphere, 32, 64).unwrap();
        let r = invariant_report(&s, &g).unwrap();
        prop_assert!((r.w.value - 0.5 * (r.wplus.value + r.wminus.value)).abs() < 1e-10 * r.w.value.max(1.0));
        prop_assert!(r.wminus.value >= 2.0 * PI - 1e-6);
    }

    #[test]
    fn negative_spin_families_have_topological_wminus(spec in surface_spec()) {
        let s = make_surface(spec.validated().unwrap()).unwrap();
        let g = build_grid(Domain::Sphere, 48, 96).unwrap();
        let r = invariant_report(&s, &g).unwrap();
        let target = 2.0 * PI * (r.chi.raw + r.chi_perp.raw);
        prop_assert!((r.wminus.value - target).abs() < 1e-6 * r.wminus.value, "{spec}");
    }

    #[test]
    fn whitney_spheres_are_critical(t in 0.0..2.5f64, p in sphere_point()) {
        let s = make_surface(FamilySpec::Whitney { t }).unwrap();
        prop_assert!(el_residual(&s, &p, Functional::Wminus).unwrap().norm() < 1e-3);
    }

    #[test]
    fn flat_torus_wminus_is_at_least_clifford(a in 0.05..1.0f64, b in 0.05..1.0f64, c in 0.05..1.0f64) {
        let spec = FamilySpec::FlatTorus { r: [a, b, c] }.validated().unwrap();
        let s = make_surface(spec).unwrap();
        let r = invariant_report(&s, &build_grid(Domain::Torus, 16, 16).unwrap()).unwrap();
        prop_assert!(r.wminus.value >= 8.0 * PI * PI / (3.0 * 3f64.sqrt()) - 1e-9);
    }
}
