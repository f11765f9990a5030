//! Curvature of the metric attached to a bracket: the connection operator
//! `S`, the curvature operator `Rm^0` and the tower of covariant
//! derivatives `Rm^k` obtained from `X ⌟ Rm^{k+1} = −S(X)·Rm^k`.
//!
//! Sign convention: `Rm(X∧Y) = ∇_{[X,Y]} − [∇_X, ∇_Y]`, so that
//! `⟨Rm(X∧Y)X, Y⟩` is the sectional curvature (`+1` on the unit sphere).

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bracket::{split, Bracket};
use crate::error::{Error, Result};
use crate::linalg::{pair_count, pairs, so_coords, so_matrix, standard_normal, wedge, Svd};
use crate::tensor::{entry_count, CurvatureDerivative};
use crate::verifier::{singer_bound, RiemannTuple};

/// Skewness defect above which the isotropy action is rejected.
const SKEW_TOL: f64 = 1e-9;

/// `S : R^m → so(m)` stored as one skew matrix per basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionOperator {
    m: usize,
    mats: Vec<DMatrix<f64>>,
}

impl ConnectionOperator {
    pub fn m(&self) -> usize {
        self.m
    }

    /// `S(e_x)` as a matrix, `S(e_x)[i][j] = ⟨S(e_x) e_j, e_i⟩`.
    pub fn matrix(&self, x: usize) -> &DMatrix<f64> {
        &self.mats[x]
    }

    /// `S(e_x)` in pair coordinates.
    pub fn coords(&self, x: usize) -> Vec<f64> {
        so_coords(&self.mats[x])
    }

    /// `S(v)` for an arbitrary vector.
    pub fn apply(&self, v: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m, self.m);
        for (x, &c) in v.iter().enumerate() {
            if c != 0.0 {
                out += &self.mats[x] * c;
            }
        }
        out
    }

    /// `max_x |S(e_x)|_op`.
    pub fn max_operator_norm(&self) -> f64 {
        self.mats
            .iter()
            .map(|s| Svd::new(s).max_singular())
            .fold(0.0, f64::max)
    }
}

/// Limits on the size of computed towers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// Largest supported base dimension.
    pub max_dim: usize,
    /// Largest number of coefficients of a single `Rm^k`.
    pub max_entries: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_dim: 6,
            max_entries: 1 << 24,
        }
    }
}

impl EngineConfig {
    fn check(&self, m: usize, order: usize) -> Result<()> {
        if m > self.max_dim {
            return Err(Error::DimensionCap {
                m,
                cap: self.max_dim,
            });
        }
        let entries = entry_count(order, m).unwrap_or(usize::MAX);
        if entries > self.max_entries {
            return Err(Error::EntryBudget {
                order,
                m,
                entries,
                budget: self.max_entries,
            });
        }
        Ok(())
    }
}

/// Derivation action `A·P` of `A ∈ so(m)` (pair coordinates) on a tensor.
pub fn derivation_act(a: &[f64], p: &CurvatureDerivative) -> Result<CurvatureDerivative> {
    if a.len() != pair_count(p.m()) {
        return Err(Error::ShapeMismatch("so(m) element has the wrong length"));
    }
    Ok(p.derivation(&so_matrix(p.m(), a)))
}

/// `S` from `−2⟨S(X)Y, Z⟩ = ⟨μ_m(X,Y),Z⟩ + ⟨μ_m(Z,X),Y⟩ + ⟨μ_m(Z,Y),X⟩`.
pub fn nomizu_connection(b: &Bracket) -> ConnectionOperator {
    let m = b.m();
    let parts = split(b);
    let mats = (0..m)
        .map(|x| {
            let mut s = DMatrix::from_fn(m, m, |z, y| {
                -0.5 * (parts.base(x, y, z) + parts.base(z, x, y) + parts.base(z, y, x))
            });
            // exact skew part; the formula is skew up to rounding
            let t = s.transpose();
            s = (&s - &t) * 0.5;
            s
        })
        .collect();
    ConnectionOperator { m, mats }
}

/// `Rm^0(X∧Y) = ad(μ_h(X,Y))|_m − [S(X), S(Y)] − S(μ_m(X,Y))`.
pub fn curvature_base(b: &Bracket) -> Result<CurvatureDerivative> {
    let (q, m) = (b.q(), b.m());
    let parts = split(b);
    let s = nomizu_connection(b);
    let iso: Vec<DMatrix<f64>> = (0..q).map(|z| b.isotropy_action(z)).collect();
    let mut worst: f64 = 0.0;
    for a in &iso {
        worst = worst.max((a + a.transpose()).amax());
    }
    if worst > SKEW_TOL * (1.0 + b.max_abs()) {
        return Err(Error::IsotropyNotSkew(worst));
    }
    let pc = pair_count(m);
    let mut out = CurvatureDerivative::zeros(0, m);
    for (p, &(x, y)) in pairs(m).iter().enumerate() {
        let mut val = DMatrix::zeros(m, m);
        for (z, a) in iso.iter().enumerate() {
            let c = parts.iso(x, y, z);
            if c != 0.0 {
                val += a * c;
            }
        }
        let (sx, sy) = (s.matrix(x), s.matrix(y));
        val -= sx * sy - sy * sx;
        let base: Vec<f64> = (0..m).map(|c| parts.base(x, y, c)).collect();
        val -= s.apply(&base);
        let coords = so_coords(&val);
        for (v, &c) in coords.iter().enumerate().take(pc) {
            out.set(&[], p, v, c);
        }
    }
    Ok(out)
}

/// `Rm^{k+1}` from `Rm^k`: `e_x ⌟ Rm^{k+1} = −S(e_x)·Rm^k`.
pub fn curvature_derive(
    s: &ConnectionOperator,
    prev: &CurvatureDerivative,
) -> Result<CurvatureDerivative> {
    if s.m() != prev.m() {
        return Err(Error::ShapeMismatch(
            "connection and tensor dimensions differ",
        ));
    }
    let parts: Vec<CurvatureDerivative> = (0..s.m())
        .map(|x| prev.derivation(s.matrix(x)).scaled(-1.0))
        .collect();
    CurvatureDerivative::stack(&parts)
}

/// `[Rm^0, …, Rm^{k_max}]` with the default limits.
pub fn curvature_tower(b: &Bracket, k_max: usize) -> Result<Vec<CurvatureDerivative>> {
    curvature_tower_with(b, k_max, &EngineConfig::default())
}

pub fn curvature_tower_with(
    b: &Bracket,
    k_max: usize,
    cfg: &EngineConfig,
) -> Result<Vec<CurvatureDerivative>> {
    cfg.check(b.m(), k_max)?;
    let s = nomizu_connection(b);
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(curvature_base(b)?);
    for k in 0..k_max {
        let next = curvature_derive(&s, &out[k])?;
        out.push(next);
    }
    Ok(out)
}

/// The Riemannian `s`-tuple of `b`; requires `s ≥ ı(m) + 2`.
pub fn curvature_tuple(b: &Bracket, s: usize) -> Result<RiemannTuple> {
    curvature_tuple_with(b, s, &EngineConfig::default())
}

pub fn curvature_tuple_with(b: &Bracket, s: usize, cfg: &EngineConfig) -> Result<RiemannTuple> {
    let required = singer_bound(b.m()) + 2;
    if s < required {
        return Err(Error::OrderTooSmall {
            s,
            m: b.m(),
            required,
        });
    }
    RiemannTuple::new(curvature_tower_with(b, s, cfg)?)
}

const ORTHONORMAL_TOL: f64 = 1e-10;

/// `⟨Rm^0(X∧Y)X, Y⟩` for an orthonormal pair.
pub fn sectional_curvature(r0: &CurvatureDerivative, x: &[f64], y: &[f64]) -> Result<f64> {
    let m = r0.m();
    if r0.order() != 0 {
        return Err(Error::ShapeMismatch(
            "sectional curvature needs the order-0 tensor",
        ));
    }
    if x.len() != m || y.len() != m {
        return Err(Error::ShapeMismatch("plane vectors must have length m"));
    }
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let defect = (dot(x, x) - 1.0)
        .abs()
        .max((dot(y, y) - 1.0).abs())
        .max(dot(x, y).abs());
    if defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    Ok(quadratic_form(r0, &wedge(x, y)))
}

fn quadratic_form(r0: &CurvatureDerivative, w: &[f64]) -> f64 {
    let pc = w.len();
    let mut acc = 0.0;
    for p in 0..pc {
        for v in 0..pc {
            acc += w[p] * w[v] * r0.get(&[], p, v);
        }
    }
    acc
}

/// Symmetric part of the curvature operator as a `P × P` matrix.
fn symmetric_operator(r0: &CurvatureDerivative) -> DMatrix<f64> {
    let pc = r0.pairs();
    DMatrix::from_fn(pc, pc, |p, v| 0.5 * (r0.get(&[], p, v) + r0.get(&[], v, p)))
}

/// Number of random starts used by [`max_abs_sec`] when `m > 3`.
pub const SEC_SEARCH_STARTS: usize = 64;

/// `max |sec|` over all planes.
///
/// For `m ≤ 3` every unit 2-vector is a plane and the value is the largest
/// absolute eigenvalue of the symmetrized operator. For `m > 3` it is the
/// best value found by projected ascent from coordinate planes and
/// [`SEC_SEARCH_STARTS`] seeded random planes; it is a lower estimate and
/// is not certified.
pub fn max_abs_sec(r0: &CurvatureDerivative) -> f64 {
    let m = r0.m();
    if m < 2 {
        return 0.0;
    }
    let sym = symmetric_operator(r0);
    if m <= 3 {
        return sym
            .symmetric_eigenvalues()
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ec);
    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (a, b) in pairs(m) {
        let mut x = vec![0.0; m];
        let mut y = vec![0.0; m];
        x[a] = 1.0;
        y[b] = 1.0;
        starts.push((x, y));
    }
    for _ in 0..SEC_SEARCH_STARTS {
        let x: Vec<f64> = (0..m).map(|_| standard_normal(&mut rng)).collect();
        let y: Vec<f64> = (0..m).map(|_| standard_normal(&mut rng)).collect();
        starts.push((x, y));
    }
    let mut best: f64 = 0.0;
    for sign in [1.0, -1.0] {
        for (x, y) in &starts {
            best = best.max(ascend_plane(&sym, x, y, sign).abs());
        }
    }
    best
}

fn normalize(v: &mut [f64]) {
    let n = libm::sqrt(v.iter().map(|c| c * c).sum::<f64>());
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
}

fn gram_schmidt(x: &mut [f64], y: &mut [f64]) {
    normalize(x);
    let d: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    y.iter_mut().zip(x.iter()).for_each(|(b, a)| *b -= d * a);
    normalize(y);
}

/// Ascent of `sign · sec` over orthonormal pairs; returns `sec` at the end point.
fn ascend_plane(sym: &DMatrix<f64>, x0: &[f64], y0: &[f64], sign: f64) -> f64 {
    let m = x0.len();
    let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
    gram_schmidt(&mut x, &mut y);
    let value = |x: &[f64], y: &[f64]| {
        let w = wedge(x, y);
        let mut acc = 0.0;
        for p in 0..w.len() {
            for v in 0..w.len() {
                acc += w[p] * w[v] * sym[(p, v)];
            }
        }
        acc
    };
    let scale = sym.amax().max(1e-300);
    let mut f = sign * value(&x, &y);
    let mut step = 0.5 / scale;
    let pl = pairs(m);
    for _ in 0..500 {
        // gradient of wᵀ Q w with w = x ∧ y
        let w = wedge(&x, &y);
        let qw = sym * nalgebra::DVector::from_column_slice(&w);
        let mut gx = vec![0.0; m];
        let mut gy = vec![0.0; m];
        for (p, &(a, b)) in pl.iter().enumerate() {
            let c = 2.0 * sign * qw[p];
            gx[a] += c * y[b];
            gx[b] -= c * y[a];
            gy[b] += c * x[a];
            gy[a] -= c * x[b];
        }
        let mut improved = false;
        while step * scale > 1e-14 {
            let mut xn: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| a + step * g).collect();
            let mut yn: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a + step * g).collect();
            gram_schmidt(&mut xn, &mut yn);
            let fnew = sign * value(&xn, &yn);
            if fnew > f {
                improved = fnew - f > 1e-15 * scale;
                x = xn;
                y = yn;
                f = fnew;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    sign * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::scale;
    use crate::fixtures;
    use crate::linalg::{pair_index, so_basis};

    fn sec_triple(b: &Bracket) -> [f64; 3] {
        let r = curvature_base(b).unwrap();
        [r.get(&[], 0, 0), r.get(&[], 2, 2), r.get(&[], 1, 1)]
    }

    #[test]
    fn reference_curvature_operator_is_diag_4_0_0() {
        let r = curvature_base(&fixtures::sphere_cross_line()).unwrap();
        for p in 0..3 {
            for v in 0..3 {
                let expected = if p == 0 && v == 0 { 4.0 } else { 0.0 };
                assert!((r.get(&[], p, v) - expected).abs() < 1e-14);
            }
        }
        let tower = curvature_tower(&fixtures::sphere_cross_line(), 4).unwrap();
        for t in &tower[1..] {
            assert_eq!(t.max_abs(), 0.0);
        }
    }

    #[test]
    fn round_sphere_has_unit_curvature_and_parallel_tensor() {
        let tower = curvature_tower(&fixtures::round_sphere3(), 3).unwrap();
        for p in 0..3 {
            for v in 0..3 {
                let expected = if p == v { 1.0 } else { 0.0 };
                assert!((tower[0].get(&[], p, v) - expected).abs() < 1e-14);
            }
        }
        for t in &tower[1..] {
            assert!(t.max_abs() < 1e-14);
        }
    }

    #[test]
    fn round_connection_is_cross_product() {
        let s = nomizu_connection(&fixtures::round_sphere3());
        // S(e_0) = E_12 sends e_1 to e_2
        assert_eq!(s.coords(0), vec![0.0, 0.0, 1.0]);
        assert_eq!(s.coords(1), vec![0.0, -1.0, 0.0]);
        assert_eq!(s.coords(2), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn berger_sectional_curvatures() {
        for eps in [0.25, 1.0 / 9.0, 0.01] {
            let [s01, s12, s02] = sec_triple(&fixtures::berger(eps));
            assert!((s01 - eps).abs() < 1e-13);
            assert!((s02 - eps).abs() < 1e-13);
            assert!((s12 - (4.0 - 3.0 * eps)).abs() < 1e-13);
            let r0 = curvature_base(&fixtures::berger(eps)).unwrap();
            assert!((max_abs_sec(&r0) - (4.0 - 3.0 * eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_curvature_planes() {
        for (b, k) in [
            (fixtures::constant_curvature_plane(1.0), 1.0),
            (fixtures::constant_curvature_plane(-1.0), -1.0),
            (fixtures::flat_plane_with_isotropy(), 0.0),
            (fixtures::solvable_hyperbolic_plane(), -1.0),
        ] {
            let tower = curvature_tower(&b, 3).unwrap();
            assert!((tower[0].get(&[], 0, 0) - k).abs() < 1e-14, "{b:?}");
            for t in &tower[1..] {
                assert!(t.max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn hyperbolic_space_has_curvature_minus_one() {
        let tower = curvature_tower(&fixtures::hyperbolic3(), 2).unwrap();
        for p in 0..3 {
            for v in 0..3 {
                let expected = if p == v { -1.0 } else { 0.0 };
                assert!((tower[0].get(&[], p, v) - expected).abs() < 1e-14);
            }
        }
        assert!(tower[1].max_abs() < 1e-14);
    }

    #[test]
    fn derivation_stabilizer_of_berger_operator() {
        let r0 = curvature_base(&fixtures::berger(0.25)).unwrap();
        let e12 = so_basis(3, pair_index(3, 1, 2));
        let e01 = so_basis(3, pair_index(3, 0, 1));
        assert!(r0.derivation(&e12).max_abs() < 1e-14);
        assert!(r0.derivation(&e01).max_abs() > 0.1);
        let round = curvature_base(&fixtures::round_sphere3()).unwrap();
        assert!(round.derivation(&e01).max_abs() < 1e-14);
        assert_eq!(derivation_act(&[0.0; 3], &r0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn scaling_by_two_quarters_round_curvature() {
        let b = scale(&fixtures::round_sphere3(), 2.0).unwrap();
        let [a, c, d] = sec_triple(&b);
        for v in [a, c, d] {
            assert!((v - 0.25).abs() < 1e-14);
        }
        let r = curvature_base(&scale(&fixtures::sphere_cross_line(), 2.0).unwrap()).unwrap();
        assert!((r.get(&[], 0, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sectional_curvature_checks_orthonormality() {
        let r0 = curvature_base(&fixtures::sphere_cross_line()).unwrap();
        assert_eq!(
            sectional_curvature(&r0, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap(),
            0.0
        );
        assert!(matches!(
            sectional_curvature(&r0, &[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0]),
            Err(Error::NotOrthonormal(_))
        ));
        let berger = curvature_base(&fixtures::berger(1.0 / 9.0)).unwrap();
        let s = sectional_curvature(&berger, &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert!((s - (4.0 - 1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn tuple_requires_singer_order() {
        assert!(matches!(
            curvature_tuple(&fixtures::round_sphere3(), 2),
            Err(Error::OrderTooSmall { required: 3, .. })
        ));
        assert_eq!(
            curvature_tuple(&fixtures::round_sphere3(), 3).unwrap().s(),
            3
        );
    }

    #[test]
    fn engine_cap_is_enforced() {
        assert!(matches!(
            curvature_tower(&fixtures::flat(7), 1),
            Err(Error::DimensionCap { m: 7, cap: 6 })
        ));
        let cfg = EngineConfig {
            max_dim: 3,
            max_entries: 1000,
        };
        assert!(matches!(
            curvature_tower_with(&fixtures::flat(3), 5, &cfg),
            Err(Error::EntryBudget { .. })
        ));
    }

    #[test]
    fn max_abs_sec_on_product_in_dimension_four() {
        // S²(1/4) × R² has max |sec| = 4 on the sphere factor
        let b = Bracket::from_entries(1, 4, &[(0, 1, 2, -2.0), (0, 2, 1, 2.0), (1, 2, 0, -2.0)])
            .unwrap();
        let r0 = curvature_base(&b).unwrap();
        assert!((max_abs_sec(&r0) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_skew_isotropy() {
        let b = Bracket::from_entries(1, 2, &[(0, 1, 1, 1.0)]).unwrap();
        assert!(matches!(curvature_base(&b), Err(Error::IsotropyNotSkew(_))));
    }
}
