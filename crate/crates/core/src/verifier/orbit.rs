//! Distance between tuples modulo `O(m)`: a multi-start damped
//! Gauss–Newton search over `a = a_0 · exp(Ξ)`.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::RiemannTuple;
use crate::error::{Error, Result};
use crate::linalg::{
    expm, orthonormalize, pair_count, random_orthogonal, signed_permutations, so_basis, so_matrix,
};
use crate::tensor::CurvatureDerivative;

/// Search budget for [`tuple_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitBudget {
    /// Random Haar starts; for `m ≤ 3` they are added to the signed permutations.
    pub random_starts: usize,
    /// Iterations per start.
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        OrbitBudget {
            random_starts: 32,
            max_iters: 200,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitResult {
    /// `Σ_k w_k |a·T1^k − T2^k|` at the best aligner.
    pub distance: f64,
    pub aligner: DMatrix<f64>,
    /// Whether the best start met the stationarity test within its budget.
    pub converged: bool,
    pub starts: usize,
}

fn check_pair(t1: &RiemannTuple, t2: &RiemannTuple, weights: &[f64]) -> Result<()> {
    if t1.m() != t2.m() {
        return Err(Error::ShapeMismatch("tuples of different dimension"));
    }
    if t1.s() != t2.s() {
        return Err(Error::ShapeMismatch("tuples of different top order"));
    }
    if weights.len() != t1.s() + 1 {
        return Err(Error::ShapeMismatch("one weight per order is required"));
    }
    if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
        return Err(Error::InvalidParameter("weights must be non-negative"));
    }
    Ok(())
}

/// `F(a) = Σ_k w_k |a·T1^k − T2^k|²`.
pub fn alignment_objective(
    t1: &RiemannTuple,
    t2: &RiemannTuple,
    weights: &[f64],
    a: &DMatrix<f64>,
) -> Result<f64> {
    check_pair(t1, t2, weights)?;
    Ok(t1
        .entries()
        .iter()
        .zip(t2.entries())
        .zip(weights)
        .map(|((x, y), w)| {
            let d = x.act(a).sub(y).expect("same shape");
            w * d.dot(&d)
        })
        .sum())
}

/// `d/dt F(a·exp(tH))` at `t = 0` for `H` given in pair coordinates.
pub fn directional_derivative(
    t1: &RiemannTuple,
    t2: &RiemannTuple,
    weights: &[f64],
    a: &DMatrix<f64>,
    h: &[f64],
) -> Result<f64> {
    check_pair(t1, t2, weights)?;
    let hm = so_matrix(t1.m(), h);
    let mut acc = 0.0;
    for ((x, y), w) in t1.entries().iter().zip(t2.entries()).zip(weights) {
        let d = x.act(a).sub(y).expect("same shape");
        let dir = x.derivation(&hm).act(a);
        acc += 2.0 * w * d.dot(&dir);
    }
    Ok(acc)
}

struct Problem<'a> {
    t1: &'a [CurvatureDerivative],
    t2: &'a [CurvatureDerivative],
    sqrt_w: Vec<f64>,
    m: usize,
}

impl Problem<'_> {
    /// Residual vector with `|r|² = F(a)`.
    fn residual(&self, a: &DMatrix<f64>) -> (Vec<CurvatureDerivative>, DVector<f64>) {
        let moved: Vec<CurvatureDerivative> = self.t1.iter().map(|t| t.act(a)).collect();
        let mut r = Vec::new();
        for ((u, y), sw) in moved.iter().zip(self.t2).zip(&self.sqrt_w) {
            let f = core::f64::consts::SQRT_2 * sw;
            r.extend(u.data().iter().zip(y.data()).map(|(p, q)| f * (p - q)));
        }
        (moved, DVector::from_vec(r))
    }

    /// Columns `∂r/∂ξ_p` for `a·exp(ξ_p E_p)`, i.e. `(a E_p aᵀ)·(a·T1)`.
    fn jacobian(
        &self,
        a: &DMatrix<f64>,
        moved: &[CurvatureDerivative],
        rows: usize,
    ) -> DMatrix<f64> {
        let pc = pair_count(self.m);
        let mut j = DMatrix::zeros(rows, pc);
        for p in 0..pc {
            let gen = a * so_basis(self.m, p) * a.transpose();
            let mut r = 0;
            for (u, sw) in moved.iter().zip(&self.sqrt_w) {
                let f = core::f64::consts::SQRT_2 * sw;
                let d = u.derivation(&gen);
                for (i, v) in d.data().iter().enumerate() {
                    j[(r + i, p)] = f * v;
                }
                r += d.data().len();
            }
        }
        j
    }

    /// Damped Gauss–Newton from `a`; returns the end point, `F` and convergence.
    fn descend(
        &self,
        start: DMatrix<f64>,
        max_iters: usize,
        scale: f64,
    ) -> (DMatrix<f64>, f64, bool) {
        let pc = pair_count(self.m);
        let mut a = start;
        let (mut moved, mut r) = self.residual(&a);
        let mut f = r.norm_squared();
        let mut lambda = 1e-3;
        let floor = 1e-30 * scale;
        for _ in 0..max_iters {
            if f <= floor {
                return (a, f, true);
            }
            let j = self.jacobian(&a, &moved, r.len());
            let g = j.transpose() * &r;
            let jtj = j.transpose() * &j;
            let jn = jtj.trace().max(1e-300);
            if g.norm() <= 1e-10 * libm::sqrt(jn * f) {
                return (a, f, true);
            }
            let mut accepted = false;
            for _ in 0..40 {
                let mut lhs = jtj.clone();
                for i in 0..pc {
                    lhs[(i, i)] += lambda * (jtj[(i, i)] + 1e-12 * jn);
                }
                let step = match lhs.cholesky() {
                    Some(c) => c.solve(&(-&g)),
                    None => {
                        lambda *= 4.0;
                        continue;
                    }
                };
                let cand = orthonormalize(&(&a * expm(&so_matrix(self.m, step.as_slice()))));
                let (cm, cr) = self.residual(&cand);
                let cf = cr.norm_squared();
                if cf < f {
                    let tiny = f - cf <= 1e-15 * f;
                    a = cand;
                    moved = cm;
                    r = cr;
                    f = cf;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    if tiny && step.norm() < 1e-12 {
                        return (a, f, true);
                    }
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted {
                // no descent direction left at working precision
                return (a, f, true);
            }
        }
        let converged = f <= floor;
        (a, f, converged)
    }
}

/// Upper bound on the `O(m)`-orbit distance with its best aligner.
///
/// Starts are every signed permutation matrix when `m ≤ 3`, plus
/// `budget.random_starts` seeded Haar-random matrices (the identity is
/// always included for larger `m`).
pub fn tuple_distance(
    t1: &RiemannTuple,
    t2: &RiemannTuple,
    weights: &[f64],
    budget: &OrbitBudget,
) -> Result<OrbitResult> {
    check_pair(t1, t2, weights)?;
    let m = t1.m();
    let mut starts = if m <= 3 {
        signed_permutations(m)
    } else {
        vec![DMatrix::identity(m, m)]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for _ in 0..budget.random_starts {
        starts.push(random_orthogonal(m, &mut rng));
    }
    let problem = Problem {
        t1: t1.entries(),
        t2: t2.entries(),
        sqrt_w: weights.iter().map(|w| libm::sqrt(*w)).collect(),
        m,
    };
    let scale: f64 = t1
        .entries()
        .iter()
        .zip(t2.entries())
        .zip(weights)
        .map(|((x, y), w)| w * (x.dot(x) + y.dot(y)))
        .sum::<f64>()
        .max(1e-300);

    let count = starts.len();
    let mut best: Option<(DMatrix<f64>, f64, bool)> = None;
    for s in starts {
        let cand = problem.descend(s, budget.max_iters, scale);
        if best.as_ref().is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    }
    let (aligner, _, converged) = best.expect("at least one start");
    let distance = t1
        .entries()
        .iter()
        .zip(t2.entries())
        .zip(weights)
        .map(|((x, y), w)| w * x.act(&aligner).sub(y).expect("same shape").norm())
        .sum();
    Ok(OrbitResult {
        distance,
        aligner,
        converged,
        starts: count,
    })
}
