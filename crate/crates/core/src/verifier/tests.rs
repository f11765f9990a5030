use super::*;
use crate::bracket::scale;
use crate::curvature::curvature_tuple;
use crate::fixtures;
use crate::linalg::{expm, pair_index};
use crate::su2::{milnor_bracket, star_family, MilnorMetric};

fn tol() -> SubspaceTolerances {
    SubspaceTolerances::default()
}

fn milnor_tuple(eps: f64, l1: f64, l2: f64, s: usize) -> RiemannTuple {
    curvature_tuple(&milnor_bracket(&MilnorMetric::new(eps, l1, l2).unwrap()), s).unwrap()
}

#[test]
fn singer_bounds() {
    assert_eq!(singer_bound(2), 0);
    assert_eq!(singer_bound(3), 1);
    assert_eq!(singer_bound(4), 1);
    assert_eq!(singer_bound(5), 7);
}

#[test]
fn genuine_tuples_pass_r1() {
    for t in [
        curvature_tuple(&fixtures::round_sphere3(), 3).unwrap(),
        milnor_tuple(0.25, 1.0, 1.0, 4),
        milnor_tuple(1.0, 2.0, 3.0, 4),
        milnor_tuple(0.3, 0.8, 2.1, 5),
        curvature_tuple(&fixtures::sphere_cross_line(), 3).unwrap(),
        curvature_tuple(&fixtures::hyperbolic3(), 3).unwrap(),
    ] {
        let r = check_r1(&t);
        assert!(r.passes(1e-10), "{:?}", r.residuals);
    }
}

#[test]
fn zero_tuple_has_zero_residuals() {
    let t = curvature_tuple(&fixtures::flat(3), 3).unwrap();
    assert_eq!(check_r1(&t).residuals, [0.0; 6]);
    assert!(check_r2(&t, &tol()).passes());
}

#[test]
fn noise_in_first_derivative_breaks_r1() {
    let t = milnor_tuple(1.0, 2.0, 3.0, 3);
    let mut entries = t.clone().into_entries();
    for (i, c) in entries[1].data_mut().iter_mut().enumerate() {
        *c = libm::sin(i as f64 * 1.7 + 0.3);
    }
    let r = check_r1(&RiemannTuple::new(entries).unwrap());
    assert!(
        r.residuals[2] > 0.1 || r.residuals[4] > 0.1,
        "{:?}",
        r.residuals
    );
}

#[test]
fn ricci_identity_sign() {
    let t = milnor_tuple(0.4, 1.3, 2.2, 4);
    let (_, n) = t.normalized();
    for k in 0..=2 {
        assert!(ricci_residual(&n, k) < 1e-12);
    }
}

#[test]
fn r2_on_round_and_berger() {
    let round = curvature_tuple(&fixtures::round_sphere3(), 3).unwrap();
    assert!(check_r2(&round, &tol()).passes());
    let berger = milnor_tuple(0.25, 1.0, 1.0, 3);
    let rep = check_r2(&berger, &tol());
    assert!(rep.passes(), "{rep:?}");
    let singer = singer_invariant(&berger, &tol());
    assert_eq!(singer.kernels, vec![1, 1, 1]);
    // the kernel is spanned by the rotation of the (e_1, e_2) plane
    let (_, n) = berger.normalized();
    let e12 = so_basis(3, pair_index(3, 1, 2));
    for k in 0..=3 {
        assert!(n.get(k).derivation(&e12).max_abs() < 1e-12);
    }
}

#[test]
fn zeroed_second_derivative_breaks_r2() {
    let t = curvature_tuple(&star_family(0.25, 0.125).unwrap(), 4).unwrap();
    assert!(check_r2(&t, &tol()).passes());
    let mut entries = t.into_entries();
    entries[2] = CurvatureDerivative::zeros(2, 3);
    let rep = check_r2(&RiemannTuple::new(entries).unwrap(), &tol());
    // the stabilizer is already trivial at order 0, so the inclusion clause is the one that fails
    assert!(!rep.passes(), "{rep:?}");
    assert!(rep.inclusions.iter().any(|c| !c.ok));
}

#[test]
fn singer_invariants() {
    let round = singer_invariant(
        &curvature_tuple(&fixtures::round_sphere3(), 3).unwrap(),
        &tol(),
    );
    assert_eq!(round.singer_k, Some(0));
    assert_eq!(round.kernels, vec![3, 3, 3]);
    // (1, 2, 3) has c_2 = 0, so two coordinate planes share the value 4/3
    // and the stabilizer of R^0 is one-dimensional; R^1 breaks it
    let coinciding = singer_invariant(&milnor_tuple(1.0, 2.0, 3.0, 3), &tol());
    assert_eq!(coinciding.kernels, vec![1, 0, 0]);
    assert_eq!(coinciding.singer_k, Some(1));
    // (1, 2, 5) has three distinct sectional values
    let generic = singer_invariant(&milnor_tuple(1.0, 2.0, 5.0, 3), &tol());
    assert_eq!(generic.kernels, vec![0, 0, 0]);
    assert_eq!(generic.singer_k, Some(0));
}

#[test]
fn nomizu_dimensions() {
    let cases = [
        (curvature_tuple(&fixtures::flat(3), 3).unwrap(), 6),
        (curvature_tuple(&fixtures::round_sphere3(), 3).unwrap(), 6),
        (milnor_tuple(0.25, 1.0, 1.0, 3), 4),
        (milnor_tuple(1.0, 2.0, 3.0, 3), 3),
        (
            curvature_tuple(&fixtures::sphere_cross_line(), 3).unwrap(),
            4,
        ),
        (curvature_tuple(&fixtures::hyperbolic3(), 3).unwrap(), 6),
    ];
    for (t, dim) in cases {
        let nb = nomizu_algebra(&t, &tol());
        assert_eq!(nb.dim, dim);
        assert!(nb.stabilized);
        assert!(nb.closure_residual < 1e-8, "{}", nb.closure_residual);
    }
}

#[test]
fn nomizu_generators_solve_unnormalized_system() {
    let t = milnor_tuple(0.25, 1.0, 1.0, 3);
    let nb = nomizu_algebra(&t, &tol());
    for g in &nb.generators {
        let a = so_matrix(3, &g.a);
        for k in 0..3 {
            let mut lhs = t.get(k).derivation(&a);
            for x in 0..3 {
                lhs = lhs.add(&t.get(k + 1).contract(x).scaled(g.v[x])).unwrap();
            }
            let scale = t.get(k + 1).norm().max(t.get(k).norm());
            assert!(lhs.max_abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn nomizu_dimension_is_scale_invariant() {
    let b = milnor_bracket(&MilnorMetric::new(0.5, 1.0, 1.7).unwrap());
    let d1 = nomizu_algebra(&curvature_tuple(&b, 3).unwrap(), &tol()).dim;
    let d2 = nomizu_algebra(
        &curvature_tuple(&scale(&b, 3.5).unwrap(), 3).unwrap(),
        &tol(),
    )
    .dim;
    assert_eq!(d1, d2);
}

#[test]
fn distance_to_rotated_copy_vanishes() {
    let t = milnor_tuple(0.7, 1.3, 2.0, 3);
    let a = expm(&so_matrix(3, &[0.9, -1.7, 0.4]));
    let w = vec![1.0; 4];
    let res = tuple_distance(&t, &t.act(&a), &w, &OrbitBudget::default()).unwrap();
    assert!(res.distance < 1e-8, "{}", res.distance);
    assert!(res.converged);
}

#[test]
fn distance_to_self_is_zero() {
    let t = milnor_tuple(0.7, 1.3, 2.0, 3);
    let res = tuple_distance(&t, &t, &[1.0; 4], &OrbitBudget::default()).unwrap();
    assert_eq!(res.distance, 0.0);
}

#[test]
fn round_versus_scaled_round() {
    let t1 = curvature_tuple(&fixtures::round_sphere3(), 3).unwrap();
    let t2 = curvature_tuple(&scale(&fixtures::round_sphere3(), 2.0).unwrap(), 3).unwrap();
    let res = tuple_distance(&t1, &t2, &[1.0; 4], &OrbitBudget::default()).unwrap();
    // operators I and I/4 on Λ²R³ differ by (3/4)·|I| = (3/4)·√6
    assert!((res.distance - 0.75 * libm::sqrt(6.0)).abs() < 1e-12);
}

#[test]
fn directional_derivative_matches_finite_differences() {
    let t1 = milnor_tuple(0.7, 1.3, 2.0, 3);
    let t2 = milnor_tuple(0.6, 1.5, 1.9, 3);
    let w = [1.0, 0.5, 0.25, 0.125];
    let a = expm(&so_matrix(3, &[0.3, 0.2, -0.5]));
    let h = [0.4, -0.1, 0.7];
    let step = 1e-5;
    let plus = alignment_objective(
        &t1,
        &t2,
        &w,
        &(&a * expm(&so_matrix(3, &h.map(|c| c * step)))),
    )
    .unwrap();
    let minus = alignment_objective(
        &t1,
        &t2,
        &w,
        &(&a * expm(&so_matrix(3, &h.map(|c| -c * step)))),
    )
    .unwrap();
    let fd = (plus - minus) / (2.0 * step);
    let an = directional_derivative(&t1, &t2, &w, &a, &h).unwrap();
    assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} {an}");
}

#[test]
fn distance_rejects_mismatched_tuples() {
    let t1 = milnor_tuple(0.7, 1.3, 2.0, 3);
    let t2 = milnor_tuple(0.7, 1.3, 2.0, 4);
    assert!(tuple_distance(&t1, &t2, &[1.0; 4], &OrbitBudget::default()).is_err());
}
