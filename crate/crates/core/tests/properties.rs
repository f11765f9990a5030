use homlab_core::linalg::{expm, so_matrix};
use homlab_core::{
    check_r1, curvature_tower, curvature_tuple, fixtures, milnor_bracket, nomizu_algebra,
    nomizu_connection, scale, tuple_distance, validate, Bracket, MilnorMetric, OrbitBudget,
    SubspaceTolerances,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn milnor() -> impl Strategy<Value = Bracket> {
    (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0)
        .prop_map(|(e, a, b)| milnor_bracket(&MilnorMetric::new(e, a, b).unwrap()))
}

/// Milnor brackets and the `S² × R` reference, which has isotropy.
fn bracket() -> impl Strategy<Value = Bracket> {
    prop_oneof![4 => milnor(), 1 => Just(fixtures::sphere_cross_line())]
}

fn moderate_milnor() -> impl Strategy<Value = Bracket> {
    (0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0)
        .prop_map(|(e, a, b)| milnor_bracket(&MilnorMetric::new(e, a, b).unwrap()))
}

fn orthogonal() -> impl Strategy<Value = DMatrix<f64>> {
    (prop::array::uniform3(-3.0f64..3.0), any::<bool>()).prop_map(|(c, flip)| {
        let mut a = expm(&so_matrix(3, &c));
        if flip {
            a.row_mut(0).neg_mut();
        }
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_round_trips(b in bracket(), r in 0.2f64..5.0) {
        let back = scale(&scale(&b, r).unwrap(), 1.0 / r).unwrap();
        prop_assert!(back.max_abs_diff(&b).unwrap() <= 1e-12 * b.max_abs());
    }

    #[test]
    fn validity_is_scale_invariant(b in bracket(), r in 0.2f64..5.0) {
        let v1 = validate(&b, 1e-8).unwrap();
        let v2 = validate(&scale(&b, r).unwrap(), 1e-8).unwrap();
        prop_assert_eq!((v1.h1_ok, v1.h2_ok, v1.h3_ok), (v2.h1_ok, v2.h2_ok, v2.h3_ok));
    }

    #[test]
    fn derivatives_scale_with_length(b in bracket(), r in 0.2f64..5.0) {
        let t1 = curvature_tower(&b, 3).unwrap();
        let t2 = curvature_tower(&scale(&b, r).unwrap(), 3).unwrap();
        for (k, (x, y)) in t1.iter().zip(&t2).enumerate() {
            let expected = x.scaled(r.powi(-(k as i32 + 2)));
            prop_assert!(y.sub(&expected).unwrap().norm() <= 1e-12 * expected.norm().max(1e-300));
        }
    }

    #[test]
    fn tower_is_equivariant(b in bracket(), a in orthogonal()) {
        let t1 = curvature_tower(&b, 3).unwrap();
        let t2 = curvature_tower(&b.rotate_base(&a).unwrap(), 3).unwrap();
        for (x, y) in t1.iter().zip(&t2) {
            let moved = x.act(&a);
            prop_assert!(y.sub(&moved).unwrap().norm() <= 1e-11 * moved.norm().max(1.0));
        }
    }

    #[test]
    fn next_order_is_bounded_by_connection(b in bracket()) {
        // each of the k + 4 index slots of an order-k tensor carries one
        // factor |S(e_x)|_op, and there are m directions x
        let s = nomizu_connection(&b).max_operator_norm();
        let t = curvature_tower(&b, 4).unwrap();
        for k in 0..4 {
            let bound = 3f64.sqrt() * (k + 4) as f64 * s * t[k].norm();
            prop_assert!(t[k + 1].norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rotated_tuples_keep_their_identities(b in bracket(), a in orthogonal()) {
        let t = curvature_tuple(&b, 3).unwrap().act(&a);
        prop_assert!(check_r1(&t).passes(1e-10));
        // the isometry algebra is transitive, so at least m-dimensional
        prop_assert!(nomizu_algebra(&t, &SubspaceTolerances::default()).dim >= 3);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn converged_distance_ignores_moving_a_tuple(b1 in moderate_milnor(), b2 in moderate_milnor(), a in orthogonal()) {
        let t1 = curvature_tuple(&b1, 3).unwrap();
        let t2 = curvature_tuple(&b2, 3).unwrap();
        let w = [1.0; 4];
        let budget = OrbitBudget::default();
        let r = tuple_distance(&t1, &t2, &w, &budget).unwrap();
        let moved = tuple_distance(&t1.act(&a), &t2, &w, &budget).unwrap();
        let unaligned: f64 = t1.entries().iter().zip(t2.entries()).map(|(x, y)| x.sub(y).unwrap().norm()).sum();
        prop_assert!(r.distance >= 0.0 && r.distance <= unaligned * (1.0 + 1e-12));
        if r.converged && moved.converged {
            let scale: f64 = t1.entries().iter().chain(t2.entries()).map(|x| x.norm()).sum();
            prop_assert!((r.distance - moved.distance).abs() <= 1e-6 * scale, "{} vs {}", r.distance, moved.distance);
        }
    }
}
