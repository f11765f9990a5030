//! Small dense linear algebra used throughout: the `so(m)`/`Λ²` pair
//! coordinates, SVD-based subspaces and the exponential of skew matrices.
//!
//! An element of `so(m)` is stored by its coefficients on `E_ab` (`a < b`,
//! lexicographic), where `E_ab = e^a ⊗ e_b − e^b ⊗ e_a` sends `e_a` to `e_b`.
//! The same coordinates are used for 2-vectors `e_a ∧ e_b`.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Number of pairs `a < b` in `0..m`.
pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Lexicographic position of `e_a ∧ e_b`, `a < b`.
#[inline]
pub fn pair_index(m: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < m);
    a * (2 * m - a - 1) / 2 + (b - a - 1)
}

/// Position and sign of `e_a ∧ e_b` for arbitrary `a, b`; `None` on the diagonal.
#[inline]
pub fn signed_pair(m: usize, a: usize, b: usize) -> Option<(usize, f64)> {
    match a.cmp(&b) {
        core::cmp::Ordering::Less => Some((pair_index(m, a, b), 1.0)),
        core::cmp::Ordering::Greater => Some((pair_index(m, b, a), -1.0)),
        core::cmp::Ordering::Equal => None,
    }
}

/// All pairs `(a, b)` with `a < b`, in lexicographic order.
pub fn pairs(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(m));
    for a in 0..m {
        for b in a + 1..m {
            out.push((a, b));
        }
    }
    out
}

/// Matrix of the `so(m)` element with the given pair coefficients.
pub fn so_matrix(m: usize, coeffs: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m, m);
    for (p, &(a, b)) in pairs(m).iter().enumerate() {
        out[(b, a)] += coeffs[p];
        out[(a, b)] -= coeffs[p];
    }
    out
}

/// Pair coefficients of the skew part of `mat`.
pub fn so_coords(mat: &DMatrix<f64>) -> Vec<f64> {
    let m = mat.nrows();
    pairs(m)
        .iter()
        .map(|&(a, b)| 0.5 * (mat[(b, a)] - mat[(a, b)]))
        .collect()
}

/// Basis element `E_p` of `so(m)` as a matrix.
pub fn so_basis(m: usize, p: usize) -> DMatrix<f64> {
    let mut c = vec![0.0; pair_count(m)];
    c[p] = 1.0;
    so_matrix(m, &c)
}

/// Pair coordinates of `x ∧ y`.
pub fn wedge(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len();
    pairs(m)
        .iter()
        .map(|&(a, b)| x[a] * y[b] - x[b] * y[a])
        .collect()
}

/// Induced action of `a ∈ GL(m)` on `Λ²R^m` in pair coordinates.
pub fn lambda2(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let pl = pairs(m);
    DMatrix::from_fn(pl.len(), pl.len(), |r, c| {
        let (i, j) = pl[r];
        let (k, l) = pl[c];
        a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)]
    })
}

/// Induced derivation of `A ∈ gl(m)` on `Λ²R^m`, the derivative of [`lambda2`].
pub fn lambda2_derivation(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let pl = pairs(m);
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    DMatrix::from_fn(pl.len(), pl.len(), |r, c| {
        let (i, j) = pl[r];
        let (k, l) = pl[c];
        a[(i, k)] * d(j, l) + d(i, k) * a[(j, l)] - a[(i, l)] * d(j, k) - d(i, l) * a[(j, k)]
    })
}

/// Thin SVD pieces of a matrix whose number of rows may be smaller than the
/// number of columns (padded with zero rows so `V` is always complete).
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular: DVector<f64>,
    /// Columns are the right singular vectors, ordered like `singular`.
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (rows, cols) = a.shape();
        let padded;
        let a = if rows < cols {
            padded = a.clone().resize_vertically(cols, 0.0);
            &padded
        } else {
            a
        };
        let svd = a.clone().svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        Svd {
            u,
            singular: svd.singular_values,
            v: v_t.transpose(),
        }
    }

    pub fn max_singular(&self) -> f64 {
        self.singular.iter().cloned().fold(0.0, f64::max)
    }

    /// Threshold `rel_tol · σ_max`.
    pub fn threshold(&self, rel_tol: f64) -> f64 {
        rel_tol * self.max_singular()
    }

    /// Numerical rank; a zero matrix has rank 0.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.max_singular();
        if smax == 0.0 {
            return 0;
        }
        let tau = rel_tol * smax;
        self.singular.iter().filter(|&&s| s > tau).count()
    }

    /// Orthonormal basis (columns) of the numerical kernel.
    pub fn kernel(&self, rel_tol: f64) -> DMatrix<f64> {
        let tau = self.threshold(rel_tol);
        let smax = self.max_singular();
        let idx: Vec<usize> = (0..self.singular.len())
            .filter(|&i| smax == 0.0 || self.singular[i] <= tau)
            .collect();
        self.v.select_columns(idx.iter())
    }

    /// Orthonormal basis (columns) of the complement of the kernel.
    pub fn corange(&self, rel_tol: f64) -> DMatrix<f64> {
        let tau = self.threshold(rel_tol);
        let smax = self.max_singular();
        let idx: Vec<usize> = (0..self.singular.len())
            .filter(|&i| smax > 0.0 && self.singular[i] > tau)
            .collect();
        self.v.select_columns(idx.iter())
    }

    /// Orthonormal basis (columns) of the numerical image.
    pub fn image(&self, rel_tol: f64) -> DMatrix<f64> {
        let tau = self.threshold(rel_tol);
        let smax = self.max_singular();
        let idx: Vec<usize> = (0..self.singular.len())
            .filter(|&i| smax > 0.0 && self.singular[i] > tau)
            .collect();
        self.u.select_columns(idx.iter())
    }
}

/// `exp(X)` by scaling and squaring of a Taylor polynomial.
pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let norm = x.iter().map(|v| v.abs()).fold(0.0, f64::max) * n as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let xs = x * scale;
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=18 {
        term = &term * &xs / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Nearest orthogonal matrix (polar factor).
pub fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

/// `max |aᵀa − I|` entrywise.
pub fn orthogonality_defect(a: &DMatrix<f64>) -> f64 {
    let n = a.ncols();
    let g = a.transpose() * a - DMatrix::<f64>::identity(n, n);
    g.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// All `2^m · m!` signed permutation matrices of `O(m)`.
pub fn signed_permutations(m: usize) -> Vec<DMatrix<f64>> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for p in &perms {
            for v in 0..m {
                if !p.contains(&v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        perms = next;
    }
    let mut out = Vec::with_capacity(perms.len() << m);
    for p in &perms {
        for signs in 0..(1usize << m) {
            let mut a = DMatrix::zeros(m, m);
            for (col, &row) in p.iter().enumerate() {
                a[(row, col)] = if signs >> col & 1 == 1 { -1.0 } else { 1.0 };
            }
            out.push(a);
        }
    }
    out
}

/// Haar-distributed orthogonal matrix from a seeded generator.
pub fn random_orthogonal<R: rand::Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(m, m, |_, _| standard_normal(rng));
    let qr = g.qr();
    let (q, r) = qr.unpack();
    // fix the sign ambiguity of QR so the distribution is Haar
    let mut q = q;
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            for i in 0..m {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Box–Muller normal deviate.
pub fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u > 0.0 {
            return libm::sqrt(-2.0 * libm::log(u)) * libm::cos(core::f64::consts::TAU * v);
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}
