//! Brackets on `R^{q+m} = R^q ⊕ R^m`: storage, the (h1)–(h3) checks,
//! restriction of degenerate brackets, scaling and the `h`/`m` split.
//!
//! Basis vectors `e_0 … e_{q-1}` span the isotropy block and
//! `e_q … e_{q+m-1}` the base block, which carries the standard inner
//! product. Base-block operators are written in local indices `0..m`.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Svd;

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Antisymmetric structure constants `μ(e_i, e_j) = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    q: usize,
    m: usize,
    coeff: Vec<f64>,
}

fn check_dims(q: usize, m: usize) -> Result<()> {
    if m == 0 || q > m * (m - 1) / 2 {
        return Err(Error::DimensionOutOfRange { q, m });
    }
    Ok(())
}

impl Bracket {
    pub fn zero(q: usize, m: usize) -> Result<Self> {
        check_dims(q, m)?;
        let n = q + m;
        Ok(Bracket {
            q,
            m,
            coeff: vec![0.0; n * n * n],
        })
    }

    /// Builds a bracket from entries `(i, j, k, c)` meaning `μ(e_i, e_j) ∋ c e_k`.
    ///
    /// Entries with `i > j` are stored as `−c` on `(j, i, k)`; repeated
    /// entries accumulate.
    pub fn from_entries(
        q: usize,
        m: usize,
        entries: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let mut b = Bracket::zero(q, m)?;
        let n = b.dim();
        for &(i, j, k, c) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::IndexOutOfRange { i, j, k, dim: n });
            }
            if i == j {
                if c != 0.0 {
                    return Err(Error::DiagonalEntry(i));
                }
                continue;
            }
            let cur = b.get(i, j, k);
            b.set(i, j, k, cur + c);
        }
        Ok(b)
    }

    /// Wraps a dense `(q+m)³` array, rejecting it unless antisymmetric within `tol`.
    /// The stored array is the exact antisymmetrization.
    pub fn from_dense(q: usize, m: usize, coeff: Vec<f64>, tol: f64) -> Result<Self> {
        check_dims(q, m)?;
        let n = q + m;
        if coeff.len() != n * n * n {
            return Err(Error::CoefficientLength {
                got: coeff.len(),
                expected: n * n * n,
            });
        }
        let mut residual: f64 = 0.0;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = coeff[(i * n + j) * n + k];
                    let b = coeff[(j * n + i) * n + k];
                    residual = residual.max((a + b).abs());
                    out[(i * n + j) * n + k] = 0.5 * (a - b);
                }
            }
        }
        if residual > tol {
            return Err(Error::NotAntisymmetric(residual));
        }
        Ok(Bracket { q, m, coeff: out })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total dimension `q + m`.
    pub fn dim(&self) -> usize {
        self.q + self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.coeff[(i * n + j) * n + k]
    }

    /// Sets `c[i][j][k] = v` and `c[j][i][k] = −v`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.dim();
        assert!(i != j || v == 0.0, "diagonal bracket entry");
        self.coeff[(i * n + j) * n + k] = v;
        self.coeff[(j * n + i) * n + k] = -v;
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }

    /// Nonzero entries with `i < j`, in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.get(i, j, k);
                    if c != 0.0 {
                        out.push((i, j, k, c));
                    }
                }
            }
        }
        out
    }

    /// `μ(x, y)` for coordinate vectors of length `q + m`.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate().take(n) {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate().take(n) {
                let w = xi * yj;
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.get(i, j, k);
                }
            }
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference against a bracket of the same shape.
    pub fn max_abs_diff(&self, other: &Bracket) -> Result<f64> {
        if self.q != other.q || self.m != other.m {
            return Err(Error::ShapeMismatch("brackets of different (q, m)"));
        }
        Ok(self
            .coeff
            .iter()
            .zip(&other.coeff)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Change of basis: the new bracket is `B⁻¹ μ(B·, B·)` for the columns of `basis`.
    pub fn change_basis(&self, basis: &DMatrix<f64>, inverse: &DMatrix<f64>) -> Bracket {
        let n = self.dim();
        // contract one index at a time: c'[i][j][k] = Σ B[a][i] B[b][j] Binv[k][c] c[a][b][c]
        let mut t1 = vec![0.0; n * n * n];
        for i in 0..n {
            for a in 0..n {
                let w = basis[(a, i)];
                if w == 0.0 {
                    continue;
                }
                for bc in 0..n * n {
                    t1[i * n * n + bc] += w * self.coeff[a * n * n + bc];
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for b in 0..n {
                    let w = basis[(b, j)];
                    if w == 0.0 {
                        continue;
                    }
                    for c in 0..n {
                        t2[(i * n + j) * n + c] += w * t1[(i * n + b) * n + c];
                    }
                }
            }
        }
        let mut out = vec![0.0; n * n * n];
        for ij in 0..n * n {
            for k in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    acc += inverse[(k, c)] * t2[ij * n + c];
                }
                out[ij * n + k] = acc;
            }
        }
        let mut b = Bracket {
            q: self.q,
            m: self.m,
            coeff: out,
        };
        b.enforce_antisymmetry();
        b
    }

    /// Orthogonal change of frame on the base block, `a ∈ O(m)`.
    ///
    /// The new frame is `e'_i = Σ_j a[i][j] e_j`, so base-block tensors built
    /// from the result equal the action `a · T` of the originals.
    pub fn rotate_base(&self, a: &DMatrix<f64>) -> Result<Bracket> {
        if a.nrows() != self.m || a.ncols() != self.m {
            return Err(Error::ShapeMismatch("rotation must be m × m"));
        }
        let n = self.dim();
        let mut basis = DMatrix::<f64>::identity(n, n);
        for i in 0..self.m {
            for j in 0..self.m {
                basis[(self.q + j, self.q + i)] = a[(i, j)];
            }
        }
        let inverse = basis.transpose();
        Ok(self.change_basis(&basis, &inverse))
    }

    fn enforce_antisymmetry(&mut self) {
        let n = self.dim();
        for i in 0..n {
            for k in 0..n {
                self.coeff[(i * n + i) * n + k] = 0.0;
            }
            for j in i + 1..n {
                for k in 0..n {
                    let v =
                        0.5 * (self.coeff[(i * n + j) * n + k] - self.coeff[(j * n + i) * n + k]);
                    self.coeff[(i * n + j) * n + k] = v;
                    self.coeff[(j * n + i) * n + k] = -v;
                }
            }
        }
    }

    /// Matrix of `ad(e_z)` restricted to the base block (local indices), `z < q`.
    pub(crate) fn isotropy_action(&self, z: usize) -> DMatrix<f64> {
        let q = self.q;
        DMatrix::from_fn(self.m, self.m, |r, c| self.get(z, q + c, q + r))
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// Max norm of the Jacobi cyclic sum over all basis triples.
    pub jacobi_residual: f64,
    /// Jacobi plus `μ(h,h) ⊂ h` and `μ(h,m) ⊂ m`.
    pub h1_ok: bool,
    /// Isotropy acts skew-symmetrically on the base block.
    pub h2_ok: bool,
    /// No nonzero isotropy vector acts trivially on the base block.
    pub h3_ok: bool,
    pub degenerate_subspace_dim: usize,
    /// Largest block-leakage coefficient checked by (h1).
    pub block_residual: f64,
    /// Largest skewness defect checked by (h2).
    pub skew_residual: f64,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.h1_ok && self.h2_ok && self.h3_ok
    }
}

/// Max-norm residual of the Jacobi identity over all basis triples.
pub fn jacobi_residual(b: &Bracket) -> f64 {
    let n = b.dim();
    // μ(μ(e_i,e_j),e_k) = Σ_l c[i][j][l] c[l][k][·]
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for out in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += b.get(i, j, l) * b.get(l, k, out)
                            + b.get(j, k, l) * b.get(l, i, out)
                            + b.get(k, i, l) * b.get(l, j, out);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Matrix whose column `z` lists `μ(e_z, e_x)` for every base vector `e_x`.
fn isotropy_matrix(b: &Bracket) -> DMatrix<f64> {
    let (q, m, n) = (b.q, b.m, b.dim());
    DMatrix::from_fn(m * n, q, |r, z| {
        let (x, k) = (r / n, r % n);
        b.get(z, q + x, k)
    })
}

/// Checks (h1)–(h3) with tolerance `tol`.
///
/// The degenerate subspace `{Z ∈ R^q : μ(Z, R^m) = 0}` is measured by
/// numerical rank with threshold `tol · σ_max`; a zero isotropy action has
/// a full kernel.
pub fn validate(b: &Bracket, tol: f64) -> Result<ValidityReport> {
    check_dims(b.q, b.m)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let (q, m) = (b.q, b.m);
    let jac = jacobi_residual(b);

    let mut block: f64 = 0.0;
    for z in 0..q {
        for w in 0..q {
            for k in q..q + m {
                block = block.max(b.get(z, w, k).abs());
            }
        }
        for x in q..q + m {
            for k in 0..q {
                block = block.max(b.get(z, x, k).abs());
            }
        }
    }

    let mut skew: f64 = 0.0;
    for z in 0..q {
        let ad = b.isotropy_action(z);
        skew = skew.max((&ad + ad.transpose()).amax());
    }

    let degenerate = if q == 0 {
        0
    } else {
        let svd = Svd::new(&isotropy_matrix(b));
        q - svd.rank(tol)
    };

    Ok(ValidityReport {
        jacobi_residual: jac,
        h1_ok: jac <= tol && block <= tol,
        h2_ok: skew <= tol,
        h3_ok: degenerate == 0,
        degenerate_subspace_dim: degenerate,
        block_residual: block,
        skew_residual: skew,
    })
}

/// Restriction of a bracket failing only (h3) to the complement of its
/// degenerate isotropy directions.
///
/// The complement basis comes from right singular vectors, so the result
/// is defined up to an orthogonal change of the remaining isotropy block.
pub fn restrict(b: &Bracket, tol: f64) -> Result<Bracket> {
    let report = validate(b, tol)?;
    if !report.h1_ok || !report.h2_ok {
        return Err(Error::RestrictionUndefined);
    }
    if report.h3_ok {
        return Ok(b.clone());
    }
    let (q, m) = (b.q, b.m);
    let n = q + m;
    let svd = Svd::new(&isotropy_matrix(b));
    let kernel = svd.kernel(tol);
    let keep = svd.corange(tol);
    let q_new = keep.ncols();
    let q_drop = kernel.ncols();

    // new isotropy basis: kernel first, then its complement
    let mut basis = DMatrix::<f64>::identity(n, n);
    for r in 0..q {
        for c in 0..q_drop {
            basis[(r, c)] = kernel[(r, c)];
        }
        for c in 0..q_new {
            basis[(r, q_drop + c)] = keep[(r, c)];
        }
    }
    let inverse = basis.transpose();
    let adapted = b.change_basis(&basis, &inverse);

    let mut out = Bracket::zero(q_new, m)?;
    let n_new = q_new + m;
    for i in 0..n_new {
        for j in i + 1..n_new {
            for k in 0..n_new {
                out.set(i, j, k, adapted.get(q_drop + i, q_drop + j, q_drop + k));
            }
        }
    }
    Ok(out)
}

/// The rescaled bracket `R·μ`: mixed block fixed, isotropy part of
/// `μ|_{m∧m}` divided by `R²`, base part divided by `R`.
pub fn scale(b: &Bracket, r: f64) -> Result<Bracket> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::NonPositiveScale(r));
    }
    let (q, n) = (b.q, b.dim());
    let mut out = b.clone();
    for i in q..n {
        for j in i + 1..n {
            for k in 0..n {
                let f = if k < q { 1.0 / (r * r) } else { 1.0 / r };
                out.set(i, j, k, b.get(i, j, k) * f);
            }
        }
    }
    Ok(out)
}

/// `μ = μ|_{h∧g} + μ_h + μ_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketSplit {
    /// Entries with at least one isotropy argument.
    pub mixed: Bracket,
    /// `iso[(a·m + b)·q + z]`: `e_z`-component of `μ(e_{q+a}, e_{q+b})`.
    pub iso_part: Vec<f64>,
    /// `base[(a·m + b)·m + c]`: `e_{q+c}`-component of `μ(e_{q+a}, e_{q+b})`.
    pub base_part: Vec<f64>,
    q: usize,
    m: usize,
}

impl BracketSplit {
    pub fn iso(&self, a: usize, b: usize, z: usize) -> f64 {
        self.iso_part[(a * self.m + b) * self.q + z]
    }

    pub fn base(&self, a: usize, b: usize, c: usize) -> f64 {
        self.base_part[(a * self.m + b) * self.m + c]
    }

    /// Reassembles the three blocks.
    pub fn recompose(&self) -> Bracket {
        let (q, m) = (self.q, self.m);
        let mut out = self.mixed.clone();
        for a in 0..m {
            for b in a + 1..m {
                for z in 0..q {
                    out.set(q + a, q + b, z, self.iso(a, b, z));
                }
                for c in 0..m {
                    out.set(q + a, q + b, q + c, self.base(a, b, c));
                }
            }
        }
        out
    }
}

/// Splits `μ` into its mixed, isotropy and base blocks by coefficient extraction.
pub fn split(b: &Bracket) -> BracketSplit {
    let (q, m, n) = (b.q, b.m, b.dim());
    let mut mixed = b.clone();
    let mut iso_part = vec![0.0; m * m * q];
    let mut base_part = vec![0.0; m * m * m];
    for a in 0..m {
        for bb in 0..m {
            for k in 0..n {
                let c = b.get(q + a, q + bb, k);
                if k < q {
                    iso_part[(a * m + bb) * q + k] = c;
                } else {
                    base_part[(a * m + bb) * m + (k - q)] = c;
                }
            }
        }
    }
    for a in q..n {
        for bb in a + 1..n {
            for k in 0..n {
                mixed.set(a, bb, k, 0.0);
            }
        }
    }
    BracketSplit {
        mixed,
        iso_part,
        base_part,
        q,
        m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn extended_reference() -> Bracket {
        // the reference bracket with an extra isotropy generator acting by zero, placed first
        let mu = fixtures::sphere_cross_line();
        let mut entries = Vec::new();
        for (i, j, k, c) in mu.entries() {
            entries.push((i + 1, j + 1, k + 1, c));
        }
        Bracket::from_entries(2, 3, &entries).unwrap()
    }

    #[test]
    fn zero_bracket_is_valid() {
        let r = validate(&Bracket::zero(0, 3).unwrap(), DEFAULT_TOL).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.degenerate_subspace_dim, 0);
    }

    #[test]
    fn sphere_cross_line_is_valid() {
        let r = validate(&fixtures::sphere_cross_line(), DEFAULT_TOL).unwrap();
        assert!(r.h1_ok && r.h2_ok && r.h3_ok, "{r:?}");
    }

    #[test]
    fn extended_reference_fails_h3_with_one_dimensional_kernel() {
        let r = validate(&extended_reference(), DEFAULT_TOL).unwrap();
        assert!(r.h1_ok && r.h2_ok);
        assert!(!r.h3_ok);
        assert_eq!(r.degenerate_subspace_dim, 1);
    }

    #[test]
    fn dimension_range_is_enforced() {
        assert_eq!(
            Bracket::zero(4, 3).unwrap_err(),
            Error::DimensionOutOfRange { q: 4, m: 3 }
        );
        assert!(Bracket::zero(0, 0).is_err());
        assert!(Bracket::zero(3, 3).is_ok());
    }

    #[test]
    fn from_dense_rejects_non_antisymmetric() {
        let mut c = vec![0.0; 8];
        // c[0][1][0] = 1 without the matching c[1][0][0]
        c[2] = 1.0;
        assert!(matches!(
            Bracket::from_dense(0, 2, c, 1e-12),
            Err(Error::NotAntisymmetric(_))
        ));
    }

    #[test]
    fn restrict_recovers_reference() {
        let r = restrict(&extended_reference(), DEFAULT_TOL).unwrap();
        assert_eq!((r.q(), r.m()), (1, 3));
        assert!(validate(&r, DEFAULT_TOL).unwrap().is_valid());
        // the surviving isotropy vector is ±e_0 of the reference bracket
        let mu = fixtures::sphere_cross_line();
        let flipped = {
            let mut basis = DMatrix::<f64>::identity(4, 4);
            basis[(0, 0)] = -1.0;
            mu.change_basis(&basis, &basis)
        };
        let d = r
            .max_abs_diff(&mu)
            .unwrap()
            .min(r.max_abs_diff(&flipped).unwrap());
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn restrict_is_identity_on_effective_brackets() {
        let mu = fixtures::sphere_cross_line();
        assert_eq!(restrict(&mu, DEFAULT_TOL).unwrap(), mu);
    }

    #[test]
    fn restrict_zero_isotropy_to_flat_plane() {
        let b = Bracket::zero(1, 2).unwrap();
        let r = restrict(&b, DEFAULT_TOL).unwrap();
        assert_eq!((r.q(), r.m()), (0, 2));
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn restrict_rejects_non_jacobi() {
        let b = Bracket::from_entries(1, 2, &[(1, 2, 1, 1.0), (0, 1, 1, 1.0)]).unwrap();
        // ad(e_0) is not skew on the base block
        assert_eq!(restrict(&b, DEFAULT_TOL), Err(Error::RestrictionUndefined));
    }

    #[test]
    fn scale_rejects_nonpositive() {
        let b = fixtures::sphere_cross_line();
        assert_eq!(scale(&b, 0.0), Err(Error::NonPositiveScale(0.0)));
        assert!(scale(&b, -1.0).is_err());
        assert_eq!(scale(&b, 1.0).unwrap(), b);
    }

    #[test]
    fn split_of_sphere_cross_line() {
        let s = split(&fixtures::sphere_cross_line());
        assert_eq!(s.iso(0, 1, 0), -2.0);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(s.base(a, b, c), 0.0);
                }
            }
        }
        // the line direction e_3 is central
        for a in 0..3 {
            assert_eq!(s.iso(2, a, 0), 0.0);
        }
        assert_eq!(s.recompose(), fixtures::sphere_cross_line());
    }

    #[test]
    fn split_of_q0_has_no_isotropy() {
        let s = split(&fixtures::round_sphere3());
        assert!(s.iso_part.is_empty());
        assert_eq!(s.base(1, 2, 0), -2.0);
    }

    #[test]
    fn rotate_base_by_identity_is_identity() {
        let mu = fixtures::sphere_cross_line();
        let r = mu.rotate_base(&DMatrix::identity(3, 3)).unwrap();
        assert!(r.max_abs_diff(&mu).unwrap() < 1e-15);
    }
}
