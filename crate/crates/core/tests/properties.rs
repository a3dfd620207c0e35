use nilcover::bisector::{bisector_z, closed_form_z, implicit_residual};
use nilcover::lattice::{decompose_tetrahedra, verify_covering, NilLattice};
use nilcover::nil::{
    compose, curve_params_from_point, distance, distance_from_origin, inverse, rotate_about_origin, translate,
};
use nilcover::optimize::{optimize_density, Method, SearchConfig};
use nilcover::simplex::{TranslationTetrahedron, TranslationTriangle};
use nilcover::{NilPoint, NilTranslation};
use proptest::prelude::*;

fn coord(r: f64) -> impl Strategy<Value = f64> {
    -r..r
}

fn point(r: f64) -> impl Strategy<Value = NilPoint> {
    (coord(r), coord(r), coord(r)).prop_map(|(x, y, z)| NilPoint::new(x, y, z))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn distance_is_symmetric(p in point(3.0), q in point(3.0)) {
        prop_assert!(close(distance(p, q), distance(q, p), 1e-12));
    }

    #[test]
    fn distance_vanishes_on_diagonal(p in point(5.0)) {
        prop_assert!(distance(p, p) < 1e-12);
    }

    #[test]
    fn distance_is_left_invariant(p in point(3.0), q in point(3.0), t in point(3.0)) {
        let t = NilTranslation::to_point(t);
        prop_assert!(close(distance(translate(p, t), translate(q, t)), distance(p, q), 1e-10));
    }

    #[test]
    fn rotation_preserves_distance_from_origin(p in point(3.0), w in -std::f64::consts::PI..std::f64::consts::PI) {
        prop_assert!(close(distance_from_origin(rotate_about_origin(p, w)), distance_from_origin(p), 1e-12));
    }

    #[test]
    fn inverse_undoes_translation(p in point(4.0), t in point(4.0)) {
        let t = NilTranslation::to_point(t);
        let back = translate(translate(p, t), inverse(t));
        prop_assert!(back.euclidean_distance(p) < 1e-12);
        let id = compose(t, inverse(t));
        prop_assert!(id.a.abs().max(id.b.abs()).max(id.c.abs()) < 1e-13);
    }

    #[test]
    fn composition_is_associative(a in point(2.0), b in point(2.0), c in point(2.0)) {
        let [a, b, c] = [a, b, c].map(NilTranslation::to_point);
        let l = compose(compose(a, b), c);
        let r = compose(a, compose(b, c));
        prop_assert!((l.a - r.a).abs().max((l.b - r.b).abs()).max((l.c - r.c).abs()) < 1e-12);
    }

    #[test]
    fn curve_parameters_round_trip(p in point(3.0)) {
        prop_assume!(p.x.abs() > 1e-3 || p.y.abs() > 1e-3 || p.z.abs() > 1e-3);
        let cp = curve_params_from_point(p).unwrap();
        prop_assert!(close(cp.r, distance_from_origin(p), 1e-10));
        prop_assert!(cp.endpoint().euclidean_distance(p) < 1e-9 * (1.0 + cp.r));
    }

    #[test]
    fn bisector_points_are_equidistant(p2 in point(2.0), x in coord(3.0), y in coord(3.0)) {
        if let Ok(Some(z)) = bisector_z(p2, x, y) {
            let p = NilPoint::new(x, y, z);
            prop_assume!(z.abs() < 1e4);
            prop_assert!(close(distance_from_origin(p), distance(p2, p), 1e-9));
            prop_assert!(implicit_residual(NilPoint::ORIGIN, p2, p).abs() < 1e-8 * (1.0 + z * z));
        }
    }

    #[test]
    fn closed_forms_agree_with_linear_solve(p2 in point(2.0), x in coord(2.0), y in coord(2.0)) {
        if let (Ok(Some(z)), Some(zc)) = (bisector_z(p2, x, y), closed_form_z(p2, x, y)) {
            prop_assume!(z.abs() < 1e3);
            prop_assert!(close(z, zc, 1e-8));
        }
    }

    #[test]
    fn axis_right_angle(a in 0.1f64..2.0, b in 0.1f64..2.0, sa in any::<bool>(), sb in any::<bool>()) {
        let (a, b) = (if sa { a } else { -a }, if sb { b } else { -b });
        let tri = TranslationTriangle::new(NilPoint::ORIGIN, NilPoint::new(a, 0.0, 0.0), NilPoint::new(0.0, b, 0.0));
        let (w, _, _) = tri.interior_angles().unwrap();
        prop_assert!((w - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn decomposition_volumes_fill_the_prism(p in prop::array::uniform5(0.3f64..2.0)) {
        let lat = NilLattice::from_params(p).unwrap();
        let total: f64 = decompose_tetrahedra(&lat).unwrap().iter().map(|t| t.euclidean_volume().abs()).sum();
        prop_assert!(close(total, (lat.t11 * lat.t22).powi(2), 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circumsphere_is_translation_equivariant(v in prop::array::uniform4(point(1.5)), t in point(2.0)) {
        let tet = TranslationTetrahedron::from_array(v);
        prop_assume!(tet.euclidean_volume().abs() > 0.02);
        let t = NilTranslation::to_point(t);
        let moved = TranslationTetrahedron::from_array(v.map(|p| translate(p, t)));
        let (a, b) = (tet.circumsphere().unwrap(), moved.circumsphere().unwrap());
        for p in v {
            prop_assert!(close(distance(p, a.center), a.radius, 1e-9));
        }
        prop_assert!(close(a.radius, b.radius, 1e-9));
        prop_assert!(translate(a.center, t).euclidean_distance(b.center) < 1e-7 * (1.0 + a.radius * a.radius));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn search_trace_is_monotone(dp in prop::array::uniform5(-0.2f64..0.2), nm in any::<bool>(), rng_seed in 0u64..100) {
        let hex = NilLattice::hexagonal_packing().params();
        let p = std::array::from_fn(|i| hex[i] + dp[i]);
        let mut cfg = SearchConfig::new(NilLattice::from_params(p).unwrap());
        cfg.method = if nm { Method::NelderMead } else { Method::CoordinateDescent };
        cfg.max_evals = 60;
        cfg.rng_seed = rng_seed;
        let res = optimize_density(&cfg).unwrap();
        prop_assert!(res.evals <= cfg.max_evals);
        prop_assert_eq!(res.trace.len(), res.evals);
        let best = res.best_so_far();
        prop_assert!(best.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*best.last().unwrap(), res.best_report.density);
    }

    #[test]
    fn verification_is_seed_deterministic(seed in any::<u64>()) {
        let lat = NilLattice::unit();
        let a = verify_covering(&lat, 0.9, 300, 1, seed).unwrap();
        let b = verify_covering(&lat, 0.9, 300, 1, seed).unwrap();
        prop_assert_eq!(a.max_min_distance.to_bits(), b.max_min_distance.to_bits());
    }
}
