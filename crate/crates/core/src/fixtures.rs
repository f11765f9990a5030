//! Reference brackets with known curvature.

use crate::bracket::Bracket;

/// `S²(1/4) × R` with one isotropy generator `e_0` rotating `e_1, e_2`;
/// its curvature operator is `diag(4, 0, 0)` and all derivatives vanish.
pub fn sphere_cross_line() -> Bracket {
    Bracket::from_entries(1, 3, &[(0, 1, 2, -2.0), (0, 2, 1, 2.0), (1, 2, 0, -2.0)])
        .expect("static bracket")
}

/// `su(2)` with the bi-invariant metric of the unit 3-sphere.
pub fn round_sphere3() -> Bracket {
    crate::su2::milnor_bracket(&crate::su2::MilnorMetric::round())
}

/// Berger sphere: fiber direction `e_0` shrunk to `ε`.
pub fn berger(eps: f64) -> Bracket {
    crate::su2::milnor_bracket(&crate::su2::MilnorMetric::new(eps, 1.0, 1.0).expect("positive ε"))
}

/// Abelian bracket on `R^m`.
pub fn flat(m: usize) -> Bracket {
    Bracket::zero(0, m).expect("m ≥ 1")
}

/// Euclidean plane as `so(2) ⋉ R²`.
pub fn flat_plane_with_isotropy() -> Bracket {
    constant_curvature_plane(0.0)
}

/// Two-dimensional space form of curvature `κ` as `so(2) ⋉` (translations),
/// with `μ(e_1, e_2) = κ e_0`.
pub fn constant_curvature_plane(kappa: f64) -> Bracket {
    Bracket::from_entries(1, 2, &[(0, 1, 2, 1.0), (0, 2, 1, -1.0), (1, 2, 0, kappa)])
        .expect("static bracket")
}

/// Hyperbolic plane as the solvable group `μ(e_0, e_1) = e_0`.
pub fn solvable_hyperbolic_plane() -> Bracket {
    Bracket::from_entries(0, 2, &[(0, 1, 0, 1.0)]).expect("static bracket")
}

/// Hyperbolic 3-space as `μ(e_0, e_1) = e_1`, `μ(e_0, e_2) = e_2`.
pub fn hyperbolic3() -> Bracket {
    Bracket::from_entries(0, 3, &[(0, 1, 1, 1.0), (0, 2, 2, 1.0)]).expect("static bracket")
}
