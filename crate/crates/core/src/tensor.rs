//! Dense storage for curvature derivatives `Rm^k : ⊗^k R^m ⊗ Λ²R^m → so(m)`.
//!
//! Coefficients are stored with `k` derivative slots of size `m`, then the
//! `Λ²` slot and the `so(m)` value, both in pair coordinates of size
//! `P = m(m−1)/2`. The flat index of `(x_1,…,x_k, p, v)` is
//! `((x_1·m + x_2)·m + …)·P·P + p·P + v`, so skewness in the `Λ²` slot and
//! in the value holds by construction.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{lambda2, lambda2_derivation, pair_count, signed_pair};

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureDerivative {
    order: usize,
    m: usize,
    data: Vec<f64>,
}

/// Number of coefficients of an order-`k` tensor in dimension `m`.
pub fn entry_count(order: usize, m: usize) -> Option<usize> {
    let p = pair_count(m);
    let mut n = p.checked_mul(p)?;
    for _ in 0..order {
        n = n.checked_mul(m)?;
    }
    Some(n)
}

impl CurvatureDerivative {
    pub fn zeros(order: usize, m: usize) -> Self {
        let n = entry_count(order, m).expect("tensor size overflow");
        CurvatureDerivative {
            order,
            m,
            data: vec![0.0; n],
        }
    }

    pub fn from_data(order: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        let expected = entry_count(order, m).ok_or(Error::ShapeMismatch("tensor size overflow"))?;
        if data.len() != expected {
            return Err(Error::CoefficientLength {
                got: data.len(),
                expected,
            });
        }
        Ok(CurvatureDerivative { order, m, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of `Λ²` pairs, `m(m−1)/2`.
    pub fn pairs(&self) -> usize {
        pair_count(self.m)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Flat position of `(slots, p, v)`.
    pub fn index(&self, slots: &[usize], p: usize, v: usize) -> usize {
        debug_assert_eq!(slots.len(), self.order);
        let pc = self.pairs();
        let mut lead = 0;
        for &x in slots {
            lead = lead * self.m + x;
        }
        (lead * pc + p) * pc + v
    }

    /// Coefficient of `E_v` in `T(e_{x_1},…,e_{x_k} | e_p)`.
    pub fn get(&self, slots: &[usize], p: usize, v: usize) -> f64 {
        self.data[self.index(slots, p, v)]
    }

    pub fn set(&mut self, slots: &[usize], p: usize, v: usize, value: f64) {
        let i = self.index(slots, p, v);
        self.data[i] = value;
    }

    /// `⟨T(e_{x_1},…,e_{x_k} | e_a ∧ e_b) e_c, e_d⟩` for arbitrary indices.
    pub fn component(&self, slots: &[usize], a: usize, b: usize, c: usize, d: usize) -> f64 {
        match (signed_pair(self.m, a, b), signed_pair(self.m, c, d)) {
            (Some((p, s1)), Some((v, s2))) => s1 * s2 * self.get(slots, p, v),
            _ => 0.0,
        }
    }

    /// Value `T(e_{x_1},…,e_{x_k} | e_p)` as an `m × m` skew matrix.
    pub fn value_matrix(&self, slots: &[usize], p: usize) -> DMatrix<f64> {
        let pc = self.pairs();
        let start = self.index(slots, p, 0);
        crate::linalg::so_matrix(self.m, &self.data[start..start + pc])
    }

    /// Slice of the order-`(k−1)` tensor `e_x ⌟ T`.
    pub fn contract(&self, x: usize) -> CurvatureDerivative {
        assert!(self.order > 0, "cannot contract an order-0 tensor");
        let block = self.data.len() / self.m;
        CurvatureDerivative {
            order: self.order - 1,
            m: self.m,
            data: self.data[x * block..(x + 1) * block].to_vec(),
        }
    }

    /// Order-`(k+1)` tensor whose contraction by `e_x` is `parts[x]`.
    pub fn stack(parts: &[CurvatureDerivative]) -> Result<CurvatureDerivative> {
        let first = parts.first().ok_or(Error::ShapeMismatch("empty stack"))?;
        if parts.len() != first.m
            || parts
                .iter()
                .any(|t| t.m != first.m || t.order != first.order)
        {
            return Err(Error::ShapeMismatch("stack needs m tensors of equal shape"));
        }
        let mut data = Vec::with_capacity(first.data.len() * first.m);
        for t in parts {
            data.extend_from_slice(&t.data);
        }
        Ok(CurvatureDerivative {
            order: first.order + 1,
            m: first.m,
            data,
        })
    }

    /// Norm: Frobenius over all slots with the value embedded as a full
    /// skew matrix and `Λ²` pairs orthonormal, i.e. `√(2 Σ coeff²)`.
    pub fn norm(&self) -> f64 {
        libm::sqrt(2.0 * self.data.iter().map(|c| c * c).sum::<f64>())
    }

    /// Inner product matching [`norm`](Self::norm).
    pub fn dot(&self, other: &CurvatureDerivative) -> f64 {
        2.0 * self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> CurvatureDerivative {
        CurvatureDerivative {
            order: self.order,
            m: self.m,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn sub(&self, other: &CurvatureDerivative) -> Result<CurvatureDerivative> {
        self.check_shape(other)?;
        Ok(CurvatureDerivative {
            order: self.order,
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &CurvatureDerivative) -> Result<CurvatureDerivative> {
        self.check_shape(other)?;
        Ok(CurvatureDerivative {
            order: self.order,
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    fn check_shape(&self, other: &CurvatureDerivative) -> Result<()> {
        if self.order != other.order || self.m != other.m {
            return Err(Error::ShapeMismatch(
                "tensors of different order or dimension",
            ));
        }
        Ok(())
    }

    /// Slot sizes: `order` copies of `m`, then `P`, `P`.
    fn dims(&self) -> Vec<usize> {
        let pc = self.pairs();
        let mut d = vec![self.m; self.order];
        d.push(pc);
        d.push(pc);
        d
    }

    /// Applies `mat` to one slot: `T'[…i…] = Σ_j mat[i][j] T[…j…]`.
    fn slot_apply(&self, slot: usize, mat: &DMatrix<f64>, out: &mut [f64]) {
        let dims = self.dims();
        let n = dims[slot];
        let inner: usize = dims[slot + 1..].iter().product();
        let outer: usize = dims[..slot].iter().product();
        for o in 0..outer {
            let base = o * n * inner;
            for i in 0..n {
                for j in 0..n {
                    let w = mat[(i, j)];
                    if w == 0.0 {
                        continue;
                    }
                    let src = base + j * inner;
                    let dst = base + i * inner;
                    for r in 0..inner {
                        out[dst + r] += w * self.data[src + r];
                    }
                }
            }
        }
    }

    /// Derivation action of `A ∈ so(m)`:
    /// `(A·P)(V_1,…,V_r) = [A, P(V_1,…,V_r)] − Σ_i P(…, A V_i, …)`, where the
    /// `Λ²` argument contributes its two slot terms.
    pub fn derivation(&self, a: &DMatrix<f64>) -> CurvatureDerivative {
        let mut out = vec![0.0; self.data.len()];
        let neg_t = -a.transpose();
        let l2 = lambda2_derivation(a);
        let neg_l2t = -l2.transpose();
        for s in 0..self.order {
            self.slot_apply(s, &neg_t, &mut out);
        }
        self.slot_apply(self.order, &neg_l2t, &mut out);
        self.slot_apply(self.order + 1, &l2, &mut out);
        CurvatureDerivative {
            order: self.order,
            m: self.m,
            data: out,
        }
    }

    /// Group action of `a ∈ O(m)`: `(a·T)(V…|Y) = a T(aᵀV…|aᵀY) aᵀ`.
    pub fn act(&self, a: &DMatrix<f64>) -> CurvatureDerivative {
        let l2 = lambda2(a);
        let mut cur = self.data.clone();
        let mut tmp = CurvatureDerivative {
            order: self.order,
            m: self.m,
            data: Vec::new(),
        };
        for s in 0..self.order + 2 {
            let mat = if s < self.order { a } else { &l2 };
            tmp.data = cur;
            let mut next = vec![0.0; tmp.data.len()];
            tmp.slot_apply(s, mat, &mut next);
            cur = next;
        }
        CurvatureDerivative {
            order: self.order,
            m: self.m,
            data: cur,
        }
    }

    /// Tensor with the first two derivative slots exchanged.
    pub fn swap_first_two(&self) -> CurvatureDerivative {
        assert!(self.order >= 2, "needs two derivative slots");
        let m = self.m;
        let block = self.data.len() / (m * m);
        let mut out = vec![0.0; self.data.len()];
        for x in 0..m {
            for y in 0..m {
                let src = (x * m + y) * block;
                let dst = (y * m + x) * block;
                out[dst..dst + block].copy_from_slice(&self.data[src..src + block]);
            }
        }
        CurvatureDerivative {
            order: self.order,
            m,
            data: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, so_matrix};

    fn sample(order: usize, m: usize, seed: u64) -> CurvatureDerivative {
        let n = entry_count(order, m).unwrap();
        let mut x = seed as f64 + 0.5;
        let data = (0..n)
            .map(|_| {
                x = libm::sin(x * 12.9898 + 78.233) * 43758.5453;
                x - libm::floor(x) - 0.5
            })
            .collect();
        CurvatureDerivative::from_data(order, m, data).unwrap()
    }

    #[test]
    fn derivation_is_derivative_of_action() {
        let t = sample(2, 3, 7);
        let a = so_matrix(3, &[0.4, -1.1, 0.3]);
        let h = 1e-6;
        let fd = t
            .act(&expm(&(&a * h)))
            .sub(&t.act(&expm(&(&a * -h))))
            .unwrap()
            .scaled(1.0 / (2.0 * h));
        let err = fd.sub(&t.derivation(&a)).unwrap().max_abs();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn action_is_a_homomorphism() {
        let t = sample(1, 4, 3);
        let a = expm(&so_matrix(4, &[0.1, 0.2, -0.3, 0.5, 0.0, 0.7]));
        let b = expm(&so_matrix(4, &[-0.4, 0.1, 0.9, 0.2, -0.6, 0.3]));
        let lhs = t.act(&(&a * &b));
        let rhs = t.act(&b).act(&a);
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-13);
        assert!((lhs.norm() - t.norm()).abs() < 1e-12);
    }

    #[test]
    fn contract_and_stack_are_inverse() {
        let t = sample(3, 3, 1);
        let parts: Vec<_> = (0..3).map(|x| t.contract(x)).collect();
        assert_eq!(CurvatureDerivative::stack(&parts).unwrap(), t);
    }

    #[test]
    fn component_is_skew_in_both_pairs() {
        let t = sample(0, 3, 2);
        assert_eq!(t.component(&[], 0, 1, 1, 2), -t.component(&[], 1, 0, 1, 2));
        assert_eq!(t.component(&[], 0, 1, 1, 2), -t.component(&[], 0, 1, 2, 1));
        assert_eq!(t.component(&[], 0, 0, 1, 2), 0.0);
    }

    #[test]
    fn norm_counts_both_skew_entries() {
        let mut t = CurvatureDerivative::zeros(0, 3);
        t.set(&[], 0, 0, 3.0);
        assert!((t.norm() - libm::sqrt(18.0)).abs() < 1e-15);
        assert!((t.value_matrix(&[], 0).norm() - libm::sqrt(18.0)).abs() < 1e-15);
    }

    #[test]
    fn swap_first_two_is_involutive() {
        let t = sample(3, 2, 5);
        assert_eq!(t.swap_first_two().swap_first_two(), t);
        assert_eq!(
            t.swap_first_two().get(&[1, 0, 1], 0, 0),
            t.get(&[0, 1, 1], 0, 0)
        );
    }
}
