use proptest::prelude::*;
use volprod::experiments::{generate, run_record, Family, GeneratorSpec};
use volprod::polarity::{polar, santalo_point, volume_product, DEFAULT_TOL};
use volprod::polytope::{convex_hull, same_vertex_set};
use volprod::simplexflags::{
    all_tangent_data, check_sandwich, tangent_residuals, RegularSimplex, CLAUSE_TOL,
};
use volprod::{Matrix, Vector};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::VertexShrink),
        Just(Family::FacetCut),
        Just(Family::RandomSupport),
        Just(Family::Scaling),
    ]
}

fn planar_body() -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4..10).prop_map(|pts| {
        let mut v: Vec<Vector> = pts
            .into_iter()
            .map(|(x, y)| Vector::from_vec(vec![x, y]))
            .collect();
        v.extend(
            [[0.4, 0.0], [-0.4, 0.0], [0.0, 0.4], [0.0, -0.4]]
                .map(|p| Vector::from_column_slice(&p)),
        );
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_bodies_are_valid(family in family(), n in 2usize..=4, delta in 0.001..0.05f64, seed in any::<u64>(), stream in 0u64..8) {
        let spec = GeneratorSpec::new(family, n, delta, seed, stream);
        let k = generate(&spec).unwrap();
        let s = RegularSimplex::new(n).unwrap();
        prop_assert!(check_sandwich(&k, &s).is_ok());
        prop_assert!(k.facet_distance(&Vector::zeros(n)) > 0.0);
        let again = convex_hull(k.vertices()).unwrap();
        prop_assert!(same_vertex_set(again.vertices(), k.vertices(), 1e-12));
        // same spec, same body
        let twin = generate(&spec).unwrap();
        prop_assert_eq!(twin.vertices(), k.vertices());
    }

    #[test]
    fn record_respects_santalo_minimality(family in family(), delta in 0.005..0.05f64, seed in any::<u64>()) {
        let spec = GeneratorSpec::new(family, 2, delta, seed, 0);
        let r = run_record(&spec, 0, false).unwrap();
        prop_assert!(r.vp <= r.vol_polar_0_product * (1.0 + 1e-12));
        if r.santalo_norm() <= 1e-7 {
            prop_assert!((r.vp - r.vol_polar_0_product).abs() <= 1e-9 * r.vp);
        }
        prop_assert!(r.vp >= 6.75 - 1e-9);
    }

    #[test]
    fn tangency_clauses_hold(n in 2usize..=3, delta in 0.002..0.04f64, seed in any::<u64>(), cut in any::<bool>()) {
        let family = if cut { Family::FacetCut } else { Family::VertexShrink };
        let k = generate(&GeneratorSpec::new(family, n, delta, seed, 0)).unwrap();
        let s = RegularSimplex::new(n).unwrap();
        let d = volprod::simplexflags::sandwich_delta(&k, &s).unwrap();
        let data = all_tangent_data(&k, &s).unwrap();
        let res = tangent_residuals(&s, &data, d);
        prop_assert!(res.all_hold(n, d, CLAUSE_TOL), "{:?}", res);
    }

    #[test]
    fn bipolar_through_rebuilt_hull(pts in planar_body()) {
        let k = convex_hull(&pts).unwrap();
        let z = Vector::zeros(2);
        let rebuilt = convex_hull(polar(&k, &z).unwrap().vertices()).unwrap();
        let back = polar(&rebuilt, &z).unwrap();
        prop_assert!(same_vertex_set(back.vertices(), k.vertices(), 1e-8));
    }

    #[test]
    fn volume_product_is_affine_invariant(pts in planar_body(), a in -0.8..0.8f64, b in 0.3..2.0f64, tx in -1.0..1.0f64) {
        let k = convex_hull(&pts).unwrap();
        let m = Matrix::from_row_slice(2, 2, &[b, a, 0.0, 1.0 / b + 0.2]);
        let t = Vector::from_vec(vec![tx, -0.5 * tx]);
        let image = k.map_affine(&m, &t).unwrap();
        let before = volume_product(&k).unwrap().vp;
        let after = volume_product(&image).unwrap().vp;
        prop_assert!((before - after).abs() <= 1e-8 * before);
    }

    #[test]
    fn santalo_point_moves_with_translation(pts in planar_body(), tx in -0.5..0.5f64, ty in -0.5..0.5f64) {
        let k = convex_hull(&pts).unwrap();
        let t = Vector::from_vec(vec![tx, ty]);
        let moved = k.translate(&t).unwrap();
        let a = santalo_point(&k, DEFAULT_TOL).unwrap().point;
        let b = santalo_point(&moved, DEFAULT_TOL).unwrap().point;
        prop_assert!((b - (a + t)).amax() <= 1e-8);
    }
}
