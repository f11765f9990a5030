//! Riemannian `s`-tuples: the symmetry identities, the homogeneity
//! conditions, the Singer invariant and the algebra of Killing generators.
//!
//! Every check runs on the homogeneously normalized tuple
//! `R̂^j = R^j / L^{j+2}` with `L = max_j |R^j|^{1/(j+2)}`, so residuals and
//! rank decisions do not depend on the overall scale of the metric.

mod orbit;

pub use orbit::{
    alignment_objective, directional_derivative, tuple_distance, OrbitBudget, OrbitResult,
};

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{pair_count, signed_pair, so_basis, so_matrix, wedge, Svd};
use crate::tensor::CurvatureDerivative;

/// Upper bound for the Singer invariant of `m`-dimensional locally
/// homogeneous spaces: exact for `m ≤ 4`, `⌈3m/2⌉ − 1` beyond.
pub fn singer_bound(m: usize) -> usize {
    match m {
        0..=2 => 0,
        3 | 4 => 1,
        _ => (3 * m).div_ceil(2) - 1,
    }
}

/// `(R^0, …, R^s)` with matching dimension and consecutive orders.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTuple {
    m: usize,
    entries: Vec<CurvatureDerivative>,
}

impl RiemannTuple {
    pub fn new(entries: Vec<CurvatureDerivative>) -> Result<Self> {
        let first = entries.first().ok_or(Error::ShapeMismatch("empty tuple"))?;
        let m = first.m();
        for (k, t) in entries.iter().enumerate() {
            if t.order() != k || t.m() != m {
                return Err(Error::ShapeMismatch(
                    "tuple entries must have orders 0..=s and equal m",
                ));
            }
        }
        Ok(RiemannTuple { m, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Top order.
    pub fn s(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[CurvatureDerivative] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> &CurvatureDerivative {
        &self.entries[k]
    }

    pub fn into_entries(self) -> Vec<CurvatureDerivative> {
        self.entries
    }

    /// The first `s + 1` entries.
    pub fn truncate(&self, s: usize) -> Result<RiemannTuple> {
        if s > self.s() {
            return Err(Error::OrderUnavailable {
                requested: s,
                available: self.s(),
            });
        }
        RiemannTuple::new(self.entries[..=s].to_vec())
    }

    /// Slotwise action of `a ∈ O(m)`.
    pub fn act(&self, a: &DMatrix<f64>) -> RiemannTuple {
        RiemannTuple {
            m: self.m,
            entries: self.entries.iter().map(|t| t.act(a)).collect(),
        }
    }

    /// `L = max_j |R^j|^{1/(j+2)}`, or 1 for the zero tuple.
    pub fn length_scale(&self) -> f64 {
        let l = self
            .entries
            .iter()
            .enumerate()
            .map(|(j, t)| libm::pow(t.norm(), 1.0 / (j + 2) as f64))
            .fold(0.0, f64::max);
        if l > 0.0 {
            l
        } else {
            1.0
        }
    }

    /// `(L, [R^j / L^{j+2}])`.
    pub fn normalized(&self) -> (f64, RiemannTuple) {
        let l = self.length_scale();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(j, t)| t.scaled(libm::pow(l, -((j + 2) as f64))))
            .collect();
        (l, RiemannTuple { m: self.m, entries })
    }
}

/// Rank thresholds shared by the homogeneity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceTolerances {
    /// Singular values below `subspace · σ_max` count as zero.
    pub subspace: f64,
    /// Relative least-squares residual accepted for an inclusion.
    pub inclusion: f64,
}

impl Default for SubspaceTolerances {
    fn default() -> Self {
        SubspaceTolerances {
            subspace: 1e-8,
            inclusion: 1e-6,
        }
    }
}

/// Residuals of the six symmetry identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R1Residuals {
    /// i) pair symmetry of `R^0`, ii) first Bianchi for `R^0`,
    /// iii) pair symmetry of `R^1`, iv) first Bianchi for `R^1`,
    /// v) second Bianchi, vi) Ricci identity for orders `2..=s`.
    pub residuals: [f64; 6],
}

impl R1Residuals {
    pub fn passes(&self, tol: f64) -> bool {
        self.residuals.iter().all(|&r| r <= tol)
    }

    pub fn max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

fn pair_symmetry(t: &CurvatureDerivative, slots: &[usize]) -> f64 {
    let pc = t.pairs();
    let mut worst: f64 = 0.0;
    for p in 0..pc {
        for v in p + 1..pc {
            worst = worst.max((t.get(slots, p, v) - t.get(slots, v, p)).abs());
        }
    }
    worst
}

fn first_bianchi(t: &CurvatureDerivative, slots: &[usize]) -> f64 {
    let m = t.m();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let s = t.component(slots, a, b, c, d)
                        + t.component(slots, b, c, a, d)
                        + t.component(slots, c, a, b, d);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

fn second_bianchi(t: &CurvatureDerivative) -> f64 {
    let m = t.m();
    let pc = t.pairs();
    let term = |x: usize, a: usize, b: usize, v: usize| match signed_pair(m, a, b) {
        Some((p, s)) => s * t.get(&[x], p, v),
        None => 0.0,
    };
    let mut worst: f64 = 0.0;
    for x in 0..m {
        for a in 0..m {
            for b in 0..m {
                for v in 0..pc {
                    let s = term(x, a, b, v) + term(a, b, x, v) + term(b, x, a, v);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Order-`(k+2)` tensor `(X_1, X_2, …) ↦ (R^0(X_1∧X_2)·R^k)(…)`.
pub fn curvature_action(r0: &CurvatureDerivative, rk: &CurvatureDerivative) -> CurvatureDerivative {
    let m = r0.m();
    let mut parts = Vec::with_capacity(m);
    for x1 in 0..m {
        let mut inner = Vec::with_capacity(m);
        for x2 in 0..m {
            let t = match signed_pair(m, x1, x2) {
                Some((p, s)) => rk.derivation(&(r0.value_matrix(&[], p) * s)),
                None => CurvatureDerivative::zeros(rk.order(), m),
            };
            inner.push(t);
        }
        parts.push(CurvatureDerivative::stack(&inner).expect("uniform shapes"));
    }
    CurvatureDerivative::stack(&parts).expect("uniform shapes")
}

/// Residual of `R^{k+2}(X_1,X_2,…) − R^{k+2}(X_2,X_1,…) = −(R^0(X_1∧X_2)·R^k)(…)`.
pub fn ricci_residual(t: &RiemannTuple, k: usize) -> f64 {
    let top = t.get(k + 2);
    let lhs = top.sub(&top.swap_first_two()).expect("same shape");
    let rhs = curvature_action(t.get(0), t.get(k)).scaled(-1.0);
    lhs.sub(&rhs).expect("same shape").max_abs()
}

/// Max-abs residuals of the six symmetry identities on the normalized tuple.
pub fn check_r1(t: &RiemannTuple) -> R1Residuals {
    let (_, n) = t.normalized();
    let r0 = n.get(0);
    let mut res = [0.0; 6];
    res[0] = pair_symmetry(r0, &[]);
    res[1] = first_bianchi(r0, &[]);
    if n.s() >= 1 {
        let r1 = n.get(1);
        for x in 0..n.m() {
            res[2] = f64::max(res[2], pair_symmetry(r1, &[x]));
            res[3] = f64::max(res[3], first_bianchi(r1, &[x]));
        }
        res[4] = second_bianchi(r1);
    }
    for k in 0..n.s().saturating_sub(1) {
        res[5] = f64::max(res[5], ricci_residual(&n, k));
    }
    R1Residuals { residuals: res }
}

/// Matrix of `A ↦ (A·R^0, …, A·R^k)` with columns indexed by `E_p`.
fn alpha(n: &RiemannTuple, k: usize) -> DMatrix<f64> {
    let m = n.m();
    let pc = pair_count(m);
    let rows: usize = (0..=k).map(|j| n.get(j).data().len()).sum();
    let mut out = DMatrix::zeros(rows, pc);
    for p in 0..pc {
        let e = so_basis(m, p);
        let mut r = 0;
        for j in 0..=k {
            let d = n.get(j).derivation(&e);
            for (i, v) in d.data().iter().enumerate() {
                out[(r + i, p)] = *v;
            }
            r += d.data().len();
        }
    }
    out
}

/// Matrix of `x ↦ (x⌟R^1, …, x⌟R^k)` with columns indexed by `e_x`.
fn beta(n: &RiemannTuple, k: usize) -> DMatrix<f64> {
    let m = n.m();
    let rows: usize = (1..=k).map(|j| n.get(j).data().len() / m).sum();
    let mut out = DMatrix::zeros(rows, m);
    for x in 0..m {
        let mut r = 0;
        for j in 1..=k {
            let c = n.get(j).contract(x);
            for (i, v) in c.data().iter().enumerate() {
                out[(r + i, x)] = *v;
            }
            r += c.data().len();
        }
    }
    out
}

fn kernel_dim(mat: &DMatrix<f64>, tol: f64) -> usize {
    mat.ncols() - Svd::new(mat).rank(tol)
}

/// Largest relative least-squares residual of the columns of `b` against the image of `a`.
fn inclusion_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> f64 {
    let svd = Svd::new(a);
    let image = svd.image(tol);
    let smax = svd.max_singular();
    let mut worst: f64 = 0.0;
    for c in 0..b.ncols() {
        let col = b.column(c).into_owned();
        let rows = col.len();
        let proj = if image.ncols() > 0 {
            let img = image.rows(0, rows);
            img * (img.transpose() * &col)
        } else {
            DVector::zeros(rows)
        };
        let resid = (&col - proj).norm();
        let scale = col.norm().max(smax);
        if scale > 0.0 {
            worst = worst.max(resid / scale);
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionCheck {
    pub k: usize,
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationCheck {
    pub k: usize,
    pub kernel_dim: usize,
    pub next_kernel_dim: usize,
    pub ok: bool,
}

/// Per-order verdicts of the homogeneity conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct R2Report {
    /// `β^k(R^m) ⊂ α^{k−1}(so(m))` for `ı(m)+2 ≤ k ≤ s`.
    pub inclusions: Vec<InclusionCheck>,
    /// `ker α^k = ker α^{k+1}` for `ı(m) ≤ k ≤ s−1`.
    pub stabilization: Vec<StabilizationCheck>,
}

impl R2Report {
    pub fn passes(&self) -> bool {
        self.inclusions.iter().all(|c| c.ok) && self.stabilization.iter().all(|c| c.ok)
    }
}

pub fn check_r2(t: &RiemannTuple, tol: &SubspaceTolerances) -> R2Report {
    let (_, n) = t.normalized();
    let (m, s) = (n.m(), n.s());
    let i_m = singer_bound(m);
    let mut inclusions = Vec::new();
    for k in (i_m + 2).max(1)..=s {
        let residual = inclusion_residual(&alpha(&n, k - 1), &beta(&n, k), tol.subspace);
        inclusions.push(InclusionCheck {
            k,
            residual,
            ok: residual <= tol.inclusion,
        });
    }
    let mut stabilization = Vec::new();
    for k in i_m..s {
        let a = kernel_dim(&alpha(&n, k), tol.subspace);
        let b = kernel_dim(&alpha(&n, k + 1), tol.subspace);
        stabilization.push(StabilizationCheck {
            k,
            kernel_dim: a,
            next_kernel_dim: b,
            ok: a == b,
        });
    }
    R2Report {
        inclusions,
        stabilization,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingerReport {
    /// `dim ker α^k` for `k = 0..s−1`.
    pub kernels: Vec<usize>,
    /// First `k` with `ker α^k = ker α^{k+1}`.
    pub singer_k: Option<usize>,
    pub stabilized: bool,
}

pub fn singer_invariant(t: &RiemannTuple, tol: &SubspaceTolerances) -> SingerReport {
    let (_, n) = t.normalized();
    let kernels: Vec<usize> = (0..n.s())
        .map(|k| kernel_dim(&alpha(&n, k), tol.subspace))
        .collect();
    let singer_k = kernels.windows(2).position(|w| w[0] == w[1]);
    SingerReport {
        stabilized: singer_k.is_some(),
        kernels,
        singer_k,
    }
}

/// Killing generator `(v, A)`: `v ⌟ R^{k+1} + A·R^k = 0` for all `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingGenerator {
    pub v: Vec<f64>,
    /// `A` in pair coordinates.
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NomizuBasis {
    pub generators: Vec<KillingGenerator>,
    pub dim: usize,
    /// Dimension with constraints only through order `s−2`.
    pub previous_dim: usize,
    /// Whether truncating one order earlier gives the same dimension.
    pub stabilized: bool,
    /// Largest distance of a bracket of two basis elements from the span,
    /// measured in normalized coordinates.
    pub closure_residual: f64,
}

fn nomizu_system(n: &RiemannTuple, top: usize) -> DMatrix<f64> {
    let m = n.m();
    let pc = pair_count(m);
    let rows: usize = (0..top).map(|k| n.get(k).data().len()).sum();
    let mut out = DMatrix::zeros(rows, m + pc);
    let mut r = 0;
    for k in 0..top {
        let len = n.get(k).data().len();
        for x in 0..m {
            let c = n.get(k + 1).contract(x);
            for (i, v) in c.data().iter().enumerate() {
                out[(r + i, x)] = *v;
            }
        }
        for p in 0..pc {
            let d = n.get(k).derivation(&so_basis(m, p));
            for (i, v) in d.data().iter().enumerate() {
                out[(r + i, m + p)] = *v;
            }
        }
        r += len;
    }
    out
}

fn nomizu_kernel(n: &RiemannTuple, top: usize, tol: f64) -> DMatrix<f64> {
    let m = n.m();
    let cols = m + pair_count(m);
    if top == 0 {
        return DMatrix::identity(cols, cols);
    }
    Svd::new(&nomizu_system(n, top)).kernel(tol)
}

/// `[(v,A),(w,B)] = (A w − B v, [A,B] + R^0(v∧w))` in stacked coordinates.
pub fn nomizu_bracket(r0: &CurvatureDerivative, x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = r0.m();
    let pc = pair_count(m);
    let (v, a) = (&x[..m], so_matrix(m, &x[m..]));
    let (w, b) = (&y[..m], so_matrix(m, &y[m..]));
    let aw = &a * DVector::from_column_slice(w);
    let bv = &b * DVector::from_column_slice(v);
    let mut out = vec![0.0; m + pc];
    for i in 0..m {
        out[i] = aw[i] - bv[i];
    }
    let mut c = &a * &b - &b * &a;
    for (p, coef) in wedge(v, w).iter().enumerate() {
        if *coef != 0.0 {
            c += r0.value_matrix(&[], p) * *coef;
        }
    }
    let coords = crate::linalg::so_coords(&c);
    out[m..].copy_from_slice(&coords);
    out
}

pub fn nomizu_algebra(t: &RiemannTuple, tol: &SubspaceTolerances) -> NomizuBasis {
    let (l, n) = t.normalized();
    let m = n.m();
    let s = n.s();
    let kernel = nomizu_kernel(&n, s, tol.subspace);
    let previous = nomizu_kernel(&n, s.saturating_sub(1), tol.subspace);
    let dim = kernel.ncols();

    let mut closure: f64 = 0.0;
    for i in 0..dim {
        for j in i + 1..dim {
            let x: Vec<f64> = kernel.column(i).iter().cloned().collect();
            let y: Vec<f64> = kernel.column(j).iter().cloned().collect();
            let br = DVector::from_vec(nomizu_bracket(n.get(0), &x, &y));
            let proj = &kernel * (kernel.transpose() * &br);
            closure = closure.max((&br - proj).norm());
        }
    }

    let generators = (0..dim)
        .map(|c| {
            let col = kernel.column(c);
            KillingGenerator {
                v: (0..m).map(|i| col[i] / l).collect(),
                a: (m..col.len()).map(|i| col[i]).collect(),
            }
        })
        .collect();
    NomizuBasis {
        generators,
        dim,
        previous_dim: previous.ncols(),
        stabilized: previous.ncols() == dim,
        closure_residual: closure,
    }
}

#[cfg(test)]
mod tests;
