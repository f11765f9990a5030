//! Taylor coefficients of the metric in normal coordinates, recovered from a
//! curvature tuple through Jacobi fields along radial geodesics.
//!
//! Along `γ(t) = exp(t y)` with a parallel frame, the Jacobi field with
//! `J(0) = 0`, `J'(0) = w` obeys `J'' = R(t) J`, where
//! `R(t)(·) = −Rm(γ̇ ∧ ·) γ̇`. Its `t`-derivatives at 0 only involve
//! `Rm^j(y,…,y | y ∧ ·) y`, so no Christoffel symbols are needed.
//! `f(t) = |J(t)|²` equals `t² g_ij(t y) w^i w^j` in normal coordinates.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{binomial, factorial, standard_normal, wedge, Svd};
use crate::tensor::CurvatureDerivative;
use crate::verifier::{tuple_distance, OrbitBudget, RiemannTuple};

const UNIT_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ_x y_x (e_x ⌟ T)`.
fn contract_vector(t: &CurvatureDerivative, y: &[f64]) -> CurvatureDerivative {
    let mut out = CurvatureDerivative::zeros(t.order() - 1, t.m());
    for (x, &c) in y.iter().enumerate() {
        if c != 0.0 {
            out = out.add(&t.contract(x).scaled(c)).expect("same shape");
        }
    }
    out
}

/// `R^{{j}}(0) : w ↦ −Rm^j(y,…,y | y∧w) y` for `j = 0..=k`, as `m × m` matrices.
pub fn radial_curvature_ops(t: &RiemannTuple, y: &[f64], k: usize) -> Result<Vec<DMatrix<f64>>> {
    let m = t.m();
    if y.len() != m {
        return Err(Error::ShapeMismatch("direction must have length m"));
    }
    let defect = (dot(y, y) - 1.0).abs();
    if defect > UNIT_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    if k > t.s() {
        return Err(Error::OrderUnavailable {
            requested: k,
            available: t.s(),
        });
    }
    let yv = DVector::from_column_slice(y);
    let mut out = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut r = t.get(j).clone();
        while r.order() > 0 {
            r = contract_vector(&r, y);
        }
        let mut op = DMatrix::zeros(m, m);
        for c in 0..m {
            let mut e = vec![0.0; m];
            e[c] = 1.0;
            let mut val = DMatrix::zeros(m, m);
            for (p, coef) in wedge(y, &e).iter().enumerate() {
                if *coef != 0.0 {
                    val += r.value_matrix(&[], p) * *coef;
                }
            }
            let col = -(val * &yv);
            op.set_column(c, &col);
        }
        out.push(op);
    }
    Ok(out)
}

/// Matrices `P_1, …, P_n` of the Jacobi recursion, evaluated on `ops`
/// (`n = ops.len()`): `P_1 = a⁰`, `P_2 = 2a¹`,
/// `P_k = k a^{k−1} + Σ_{i=1}^{k−2} C(k, i+2) a^{k−2−i} P_i`.
pub fn jacobi_polynomials(ops: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let n = ops.len();
    let mut p: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut cur = &ops[k - 1] * (k as f64);
        if k == 2 {
            cur = &ops[1] * 2.0;
        }
        for i in 1..=k.saturating_sub(2) {
            cur += &ops[k - 2 - i] * &p[i - 1] * binomial(k, i + 2);
        }
        p.push(cur);
    }
    p
}

/// `J^{{k}}(0)` for `k = 0..=ops.len()+2`.
pub fn jacobi_jet(ops: &[DMatrix<f64>], w: &[f64]) -> Vec<Vec<f64>> {
    let m = w.len();
    let wv = DVector::from_column_slice(w);
    let mut out = vec![vec![0.0; m], w.to_vec(), vec![0.0; m]];
    for p in jacobi_polynomials(ops) {
        out.push((p * &wv).as_slice().to_vec());
    }
    out
}

/// Noncommutative expansion of `P_k` as words in the letters `a⁰, a¹, …`
/// (letter `j` stands for `a^j`) with integer coefficients.
pub fn jacobi_polynomial_words(k: usize) -> BTreeMap<Vec<usize>, u64> {
    let mut polys: Vec<BTreeMap<Vec<usize>, u64>> = Vec::new();
    for n in 1..=k {
        let mut cur = BTreeMap::new();
        let lead = if n == 2 { 2 } else { n as u64 };
        cur.insert(vec![n - 1], lead);
        for i in 1..=n.saturating_sub(2) {
            let c = binomial(n, i + 2) as u64;
            for (word, coef) in &polys[i - 1] {
                let mut w = vec![n - 2 - i];
                w.extend_from_slice(word);
                *cur.entry(w).or_insert(0) += c * coef;
            }
        }
        polys.push(cur);
    }
    polys.pop().unwrap_or_default()
}

/// Jets of the Jacobi field and of `f = |J|²` along one radial geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialJet {
    pub direction: Vec<f64>,
    pub transverse: Vec<f64>,
    pub jacobi_jets: Vec<Vec<f64>>,
    /// `f^{(k)}(0)` for `k = 0..=K+4`.
    pub f_derivs: Vec<f64>,
}

/// `f^{(n)}(0)` from the Jacobi jets, split by parity as in the proof of the
/// polynomial expansion.
fn f_derivative(j: &[Vec<f64>], n: usize) -> f64 {
    let w = &j[1];
    match n {
        0 | 1 => 0.0,
        2 => 2.0 * dot(w, w),
        _ if n % 2 == 1 => {
            let k = (n - 1) / 2;
            let mut acc = 2.0 * n as f64 * dot(&j[2 * k], w);
            for i in 3..=k {
                acc += 2.0 * binomial(n, i) * dot(&j[n - i], &j[i]);
            }
            acc
        }
        _ => {
            let k = (n - 2) / 2;
            let mut acc = 2.0 * n as f64 * dot(&j[2 * k + 1], w);
            for i in 3..=k {
                acc += 2.0 * binomial(n, i) * dot(&j[n - i], &j[i]);
            }
            acc + binomial(n, k + 1) * dot(&j[k + 1], &j[k + 1])
        }
    }
}

/// `f^{(k)}(0)` for `k ≤ K + 4`; needs `K ≤ s`.
pub fn radial_metric_jet(t: &RiemannTuple, y: &[f64], w: &[f64], k: usize) -> Result<RadialJet> {
    if w.len() != t.m() {
        return Err(Error::ShapeMismatch("transverse vector must have length m"));
    }
    let ops = radial_curvature_ops(t, y, k)?;
    Ok(jet_from_ops(&ops, y, w))
}

fn jet_from_ops(ops: &[DMatrix<f64>], y: &[f64], w: &[f64]) -> RadialJet {
    let jets = jacobi_jet(ops, w);
    let top = ops.len() + 3;
    let f_derivs = (0..=top).map(|n| f_derivative(&jets, n)).collect();
    RadialJet {
        direction: y.to_vec(),
        transverse: w.to_vec(),
        jacobi_jets: jets,
        f_derivs,
    }
}

/// Exponent vectors of degree `d` in `m` variables, lexicographically descending.
pub fn monomials(m: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, d: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m - 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(m, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, d, &mut Vec::new(), &mut out);
    out
}

fn monomial_value(y: &[f64], q: &[usize]) -> f64 {
    y.iter()
        .zip(q)
        .map(|(v, &e)| libm::pow(*v, e as f64))
        .product()
}

fn multi_factorial(q: &[usize]) -> f64 {
    q.iter().map(|&e| factorial(e)).product()
}

/// Partial derivatives of one homogeneous degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeBlock {
    pub degree: usize,
    pub monomials: Vec<Vec<usize>>,
    /// `values[(q·m + i)·m + j] = ∂^q g_ij(0)`.
    pub values: Vec<f64>,
}

/// `∂^q g_ij(0)` for `|q| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub m: usize,
    pub order: usize,
    pub blocks: Vec<DegreeBlock>,
}

impl MetricJet {
    /// `∂^q g_ij(0)` for an exponent vector `q`.
    pub fn get(&self, i: usize, j: usize, q: &[usize]) -> Option<f64> {
        let d: usize = q.iter().sum();
        let block = self.blocks.get(d)?;
        let idx = block.monomials.iter().position(|x| x == q)?;
        Some(block.values[(idx * self.m + i) * self.m + j])
    }

    /// Largest coefficient difference over all degrees.
    pub fn max_abs_diff(&self, other: &MetricJet) -> Result<f64> {
        if self.m != other.m || self.order != other.order {
            return Err(Error::ShapeMismatch("metric jets of different shape"));
        }
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }
}

/// Largest integer entry used for interpolation nodes before falling back
/// to seeded random directions.
const MAX_NODE_ENTRY: i64 = 4;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive integer vectors with entries in `[−b, b]` and first nonzero
/// entry positive, normalized to unit length.
fn integer_nodes(m: usize, b: i64) -> Vec<Vec<f64>> {
    let side = (2 * b + 1) as usize;
    let total = side.pow(m as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..m)
            .map(|_| {
                let e = (c % side) as i64 - b;
                c /= side;
                e
            })
            .collect();
        let first = v.iter().find(|&&e| e != 0);
        if first.is_none_or(|&e| e < 0) {
            continue;
        }
        if v.iter().fold(0, |g, &e| gcd(g, e)) != 1 {
            continue;
        }
        let n = libm::sqrt(v.iter().map(|&e| (e * e) as f64).sum());
        out.push(v.iter().map(|&e| e as f64 / n).collect());
    }
    out
}

fn design_matrix(nodes: &[Vec<f64>], monos: &[Vec<usize>]) -> DMatrix<f64> {
    DMatrix::from_fn(nodes.len(), monos.len(), |r, c| {
        monomial_value(&nodes[r], &monos[c])
    })
}

/// Nodes on which every degree `≤ top` is uniquely determined.
fn node_set(m: usize, top: usize) -> Result<Vec<Vec<f64>>> {
    let needed = monomials(m, top).len();
    let full_rank = |nodes: &[Vec<f64>]| {
        (2..=top).all(|d| {
            let monos = monomials(m, d);
            Svd::new(&design_matrix(nodes, &monos)).rank(1e-10) == monos.len()
        })
    };
    for b in 1..=MAX_NODE_ENTRY {
        let nodes = integer_nodes(m, b);
        if nodes.len() >= needed && full_rank(&nodes) {
            return Ok(nodes);
        }
    }
    let mut nodes = integer_nodes(m, MAX_NODE_ENTRY);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e0de);
    for _ in 0..4 * needed {
        let mut v: Vec<f64> = (0..m).map(|_| standard_normal(&mut rng)).collect();
        let n = libm::sqrt(dot(&v, &v));
        v.iter_mut().for_each(|c| *c /= n);
        nodes.push(v);
    }
    if full_rank(&nodes) {
        Ok(nodes)
    } else {
        let rank = Svd::new(&design_matrix(&nodes, &monomials(m, top))).rank(1e-10);
        Err(Error::RankDeficientNodes { rank, needed })
    }
}

/// All `∂^q g_ij(0)` with `|q| ≤ K`; needs `K ≤ s + 2`.
pub fn metric_taylor(t: &RiemannTuple, k: usize) -> Result<MetricJet> {
    let m = t.m();
    if k > t.s() + 2 {
        return Err(Error::OrderUnavailable {
            requested: k,
            available: t.s() + 2,
        });
    }
    let mut blocks = Vec::with_capacity(k + 1);
    for d in 0..=k.min(1) {
        let monos = monomials(m, d);
        let mut values = vec![0.0; monos.len() * m * m];
        if d == 0 {
            for i in 0..m {
                values[i * m + i] = 1.0;
            }
        }
        blocks.push(DegreeBlock {
            degree: d,
            monomials: monos,
            values,
        });
    }
    if k < 2 {
        return Ok(MetricJet {
            m,
            order: k,
            blocks,
        });
    }

    let nodes = node_set(m, k)?;
    // samples[node][d-2][(i, j)] = G_ij(y) for degree d
    let mut samples = vec![vec![DMatrix::<f64>::zeros(m, m); k - 1]; nodes.len()];
    for (ni, y) in nodes.iter().enumerate() {
        let ops = radial_curvature_ops(t, y, k - 2)?;
        let mut diag = vec![vec![0.0; k - 1]; m];
        for (i, row) in diag.iter_mut().enumerate() {
            let mut w = vec![0.0; m];
            w[i] = 1.0;
            let jet = jet_from_ops(&ops, y, &w);
            for d in 2..=k {
                row[d - 2] = jet.f_derivs[d + 2] / factorial(d + 2);
            }
        }
        for i in 0..m {
            for d in 2..=k {
                samples[ni][d - 2][(i, i)] = diag[i][d - 2];
            }
            for j in i + 1..m {
                let mut w = vec![0.0; m];
                w[i] = 1.0;
                w[j] = 1.0;
                let jet = jet_from_ops(&ops, y, &w);
                for d in 2..=k {
                    let v = jet.f_derivs[d + 2] / factorial(d + 2);
                    let g = 0.5 * (v - diag[i][d - 2] - diag[j][d - 2]);
                    samples[ni][d - 2][(i, j)] = g;
                    samples[ni][d - 2][(j, i)] = g;
                }
            }
        }
    }

    for d in 2..=k {
        let monos = monomials(m, d);
        let a = design_matrix(&nodes, &monos);
        let svd = a.clone().svd(true, true);
        let mut values = vec![0.0; monos.len() * m * m];
        for i in 0..m {
            for j in i..m {
                let rhs =
                    DVector::from_iterator(nodes.len(), samples.iter().map(|s| s[d - 2][(i, j)]));
                let coef = svd
                    .solve(&rhs, 1e-12)
                    .map_err(|_| Error::RankDeficientNodes {
                        rank: 0,
                        needed: monos.len(),
                    })?;
                for (qi, q) in monos.iter().enumerate() {
                    let v = multi_factorial(q) * coef[qi];
                    values[(qi * m + i) * m + j] = v;
                    values[(qi * m + j) * m + i] = v;
                }
            }
        }
        blocks.push(DegreeBlock {
            degree: d,
            monomials: monos,
            values,
        });
    }
    Ok(MetricJet {
        m,
        order: k,
        blocks,
    })
}

/// Coefficient gaps between the normal-coordinate jets of two tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct LauretGap {
    /// After moving the first tuple by the best orbit aligner.
    pub aligned: f64,
    pub unaligned: f64,
    pub aligner: DMatrix<f64>,
}

pub fn lauret_gap(
    t1: &RiemannTuple,
    t2: &RiemannTuple,
    k: usize,
    budget: &OrbitBudget,
) -> Result<LauretGap> {
    if t1.m() != t2.m() {
        return Err(Error::ShapeMismatch("tuples of different dimension"));
    }
    let s = t1.s().min(t2.s());
    if k > s + 2 {
        return Err(Error::OrderUnavailable {
            requested: k,
            available: s + 2,
        });
    }
    let (a1, a2) = (t1.truncate(s)?, t2.truncate(s)?);
    let orbit = tuple_distance(&a1, &a2, &vec![1.0; s + 1], budget)?;
    let j2 = metric_taylor(&a2, k)?;
    let unaligned = metric_taylor(&a1, k)?.max_abs_diff(&j2)?;
    let aligned = metric_taylor(&a1.act(&orbit.aligner), k)?.max_abs_diff(&j2)?;
    Ok(LauretGap {
        aligned,
        unaligned,
        aligner: orbit.aligner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::scale;
    use crate::curvature::curvature_tuple;
    use crate::fixtures;

    fn sphere2() -> RiemannTuple {
        curvature_tuple(&fixtures::constant_curvature_plane(1.0), 4).unwrap()
    }

    #[test]
    fn sphere_radial_operator() {
        let ops = radial_curvature_ops(&sphere2(), &[1.0, 0.0], 2).unwrap();
        assert!((ops[0][(1, 1)] + 1.0).abs() < 1e-14);
        assert!(ops[0][(0, 0)].abs() < 1e-14);
        assert!(ops[1].amax() < 1e-14 && ops[2].amax() < 1e-14);
        let round = curvature_tuple(&fixtures::round_sphere3(), 3).unwrap();
        let y = [0.0, 0.6, 0.8];
        let op = &radial_curvature_ops(&round, &y, 0).unwrap()[0];
        let yv = DVector::from_column_slice(&y);
        let proj = DMatrix::identity(3, 3) - &yv * yv.transpose();
        assert!((op + proj).amax() < 1e-14);
    }

    #[test]
    fn order_above_tuple_is_rejected() {
        assert!(radial_curvature_ops(&sphere2(), &[1.0, 0.0], 5).is_err());
        assert!(radial_curvature_ops(&sphere2(), &[1.0, 1.0], 0).is_err());
    }

    #[test]
    fn sphere_jacobi_field_is_sine() {
        let ops = radial_curvature_ops(&sphere2(), &[1.0, 0.0], 4).unwrap();
        let j = jacobi_jet(&ops, &[0.0, 1.0]);
        // sin t: derivatives 0, 1, 0, −1, 0, 1, 0, −1
        let expected = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((j[k][1] - e).abs() < 1e-13, "k={k}");
            assert!(j[k][0].abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_f_derivatives() {
        let jet = radial_metric_jet(&sphere2(), &[1.0, 0.0], &[0.0, 1.0], 2).unwrap();
        // sin² t = t² − t⁴/3 + 2t⁶/45 − …
        assert_eq!(jet.f_derivs[2], 2.0);
        assert!(jet.f_derivs[3].abs() < 1e-12);
        assert!((jet.f_derivs[4] + 8.0).abs() < 1e-12);
        assert!(jet.f_derivs[5].abs() < 1e-12);
        assert!((jet.f_derivs[6] - 32.0).abs() < 1e-12);
    }

    #[test]
    fn parity_formulas_match_leibniz() {
        let t = curvature_tuple(&crate::su2::star_family(0.5, 0.3).unwrap(), 5).unwrap();
        let y = [0.48, 0.6, 0.64];
        let w = [0.3, -1.1, 0.2];
        let jet = radial_metric_jet(&t, &y, &w, 5).unwrap();
        let j = &jet.jacobi_jets;
        for n in 2..jet.f_derivs.len() {
            let leibniz: f64 = (1..n).map(|i| binomial(n, i) * dot(&j[i], &j[n - i])).sum();
            let scale = leibniz.abs().max(1.0);
            assert!((jet.f_derivs[n] - leibniz).abs() < 1e-10 * scale, "n={n}");
        }
    }

    #[test]
    fn jacobi_recursion_matches_leibniz_expansion() {
        // J^{(k+2)} = Σ_i C(k, i) a^i J^{(k−i)}
        let t = curvature_tuple(&crate::su2::star_family(0.5, 0.3).unwrap(), 5).unwrap();
        let y = [0.0, 0.6, 0.8];
        let ops = radial_curvature_ops(&t, &y, 5).unwrap();
        let w = [1.0, 0.2, -0.4];
        let j = jacobi_jet(&ops, &w);
        for k in 1..=5 {
            let mut acc = DVector::zeros(3);
            for (i, op) in ops.iter().enumerate().take(k + 1) {
                acc += op * DVector::from_column_slice(&j[k - i]) * binomial(k, i);
            }
            let diff = (acc - DVector::from_column_slice(&j[k + 2])).amax();
            assert!(
                diff < 1e-9 * j[k + 2].iter().map(|v| v.abs()).fold(1.0, f64::max),
                "k={k}"
            );
        }
    }

    #[test]
    fn jacobi_polynomial_degree() {
        for k in 1..=10 {
            let words = jacobi_polynomial_words(k);
            let deg = words.keys().map(|w| w.len()).max().unwrap();
            assert_eq!(deg, k.div_ceil(2), "k={k}");
        }
        let p3 = jacobi_polynomial_words(3);
        assert_eq!(p3.get(&vec![2]), Some(&3));
        assert_eq!(p3.get(&vec![0, 0]), Some(&1));
    }

    #[test]
    fn sphere_second_order_coefficient() {
        let jet = metric_taylor(&sphere2(), 2).unwrap();
        assert!((jet.get(1, 1, &[2, 0]).unwrap() + 2.0 / 3.0).abs() < 1e-12);
        assert!((jet.get(0, 1, &[1, 1]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(jet.get(0, 0, &[0, 0]), Some(1.0));
    }

    #[test]
    fn flat_jet_is_identity() {
        let t = curvature_tuple(&fixtures::flat(3), 3).unwrap();
        let jet = metric_taylor(&t, 5).unwrap();
        for b in &jet.blocks[1..] {
            assert!(b.values.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn first_order_vanishes_and_jet_is_symmetric() {
        let t = curvature_tuple(&crate::su2::star_family(0.5, 0.3).unwrap(), 4).unwrap();
        let jet = metric_taylor(&t, 4).unwrap();
        assert!(jet.blocks[1].values.iter().all(|v| v.abs() < 1e-12));
        for b in &jet.blocks {
            let nm = b.monomials.len();
            for q in 0..nm {
                for i in 0..3 {
                    for j in 0..3 {
                        let d = b.values[(q * 3 + i) * 3 + j] - b.values[(q * 3 + j) * 3 + i];
                        assert!(d.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn round_versus_flat_gap() {
        let flat = curvature_tuple(&fixtures::flat_plane_with_isotropy(), 2).unwrap();
        let round = curvature_tuple(&fixtures::constant_curvature_plane(1.0), 2).unwrap();
        let gap = lauret_gap(&round, &flat, 2, &OrbitBudget::default()).unwrap();
        assert!((gap.aligned - 2.0 / 3.0).abs() < 1e-12);
        assert!((gap.unaligned - 2.0 / 3.0).abs() < 1e-12);
        let same = lauret_gap(&round, &round, 2, &OrbitBudget::default()).unwrap();
        assert!(same.aligned < 1e-12);
    }

    #[test]
    fn berger_jet_is_continuous_in_eps() {
        let jet =
            |e: f64| metric_taylor(&curvature_tuple(&fixtures::berger(e), 3).unwrap(), 4).unwrap();
        let d = jet(0.3).max_abs_diff(&jet(0.3 + 1e-6)).unwrap();
        assert!(d < 1e-4, "{d}");
    }

    #[test]
    fn scaled_sphere_jet() {
        let t = curvature_tuple(
            &scale(&fixtures::constant_curvature_plane(1.0), 2.0).unwrap(),
            2,
        )
        .unwrap();
        let jet = metric_taylor(&t, 2).unwrap();
        assert!((jet.get(1, 1, &[2, 0]).unwrap() + 2.0 / 12.0).abs() < 1e-12);
    }
}
