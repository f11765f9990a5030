//! Left-invariant metrics on `SU(2)` in Milnor frames: closed forms for the
//! curvature, power-law families of collapsing metrics and their tables.

use alloc::vec::Vec;
use num_rational::Ratio;

use crate::bracket::Bracket;
use crate::curvature::curvature_tower_with;
use crate::curvature::EngineConfig;
use crate::error::{Error, Result};
use crate::linalg::pair_index;
use crate::tensor::CurvatureDerivative;

/// Diagonal metric `g(X_0,X_0) = ε`, `g(X_1,X_1) = λ_1`, `g(X_2,X_2) = λ_2`
/// in a Milnor frame of `su(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilnorMetric {
    pub eps: f64,
    pub l1: f64,
    pub l2: f64,
}

impl MilnorMetric {
    pub fn new(eps: f64, l1: f64, l2: f64) -> Result<Self> {
        if !(eps > 0.0 && l1 > 0.0 && l2 > 0.0)
            || !(eps.is_finite() && l1.is_finite() && l2.is_finite())
        {
            return Err(Error::InvalidParameter(
                "Milnor coefficients must be positive and finite",
            ));
        }
        Ok(MilnorMetric { eps, l1, l2 })
    }

    pub fn round() -> Self {
        MilnorMetric {
            eps: 1.0,
            l1: 1.0,
            l2: 1.0,
        }
    }
}

fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Structure constants in the orthonormal frame `e_i = X_i/|X_i|`.
pub fn milnor_bracket(g: &MilnorMetric) -> Bracket {
    let MilnorMetric { eps, l1, l2 } = *g;
    Bracket::from_entries(
        0,
        3,
        &[
            (0, 1, 2, -2.0 * sqrt(l2 / (eps * l1))),
            (0, 2, 1, 2.0 * sqrt(l1 / (eps * l2))),
            (1, 2, 0, -2.0 * sqrt(eps / (l1 * l2))),
        ],
    )
    .expect("static shape")
}

/// The `c_i` coefficients and sectional curvatures of the coordinate planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Invariants {
    pub c: [f64; 3],
    pub sec01: f64,
    pub sec12: f64,
    pub sec02: f64,
    /// Largest relative disagreement between the `c`-form and the explicit
    /// `ε, λ`-form of the sectional curvatures.
    pub form_disagreement: f64,
}

pub fn connection_coefficients(g: &MilnorMetric) -> [f64; 3] {
    let MilnorMetric { eps, l1, l2 } = *g;
    let root = sqrt(eps * l1 * l2);
    [
        (-eps + l1 + l2) / root,
        (eps - l1 + l2) / root,
        (eps + l1 - l2) / root,
    ]
}

pub fn su2_invariants(g: &MilnorMetric) -> Su2Invariants {
    let c = connection_coefficients(g);
    let [c0, c1, c2] = c;
    let sec01 = -c0 * c1 + c1 * c2 + c0 * c2;
    let sec12 = c0 * c1 - c1 * c2 + c0 * c2;
    let sec02 = c0 * c1 + c1 * c2 - c0 * c2;

    let MilnorMetric { eps, l1, l2 } = *g;
    let d = l2 - l1;
    let pre = 1.0 / (l1 * l2);
    let e01 = pre * (eps + 2.0 * d - d * (l1 + 3.0 * l2) / eps);
    let e12 = pre * (-3.0 * eps + 2.0 * (l1 + l2) + d * d / eps);
    let e02 = pre * (eps - 2.0 * d + d * (l2 + 3.0 * l1) / eps);

    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    Su2Invariants {
        c,
        sec01,
        sec12,
        sec02,
        form_disagreement: rel(sec01, e01).max(rel(sec12, e12)).max(rel(sec02, e02)),
    }
}

/// `Rm^1` from its six nonzero closed-form components.
pub fn rm1_closed(g: &MilnorMetric) -> CurvatureDerivative {
    let [c0, c1, c2] = connection_coefficients(g);
    let p = |a, b| pair_index(3, a, b);
    let mut t = CurvatureDerivative::zeros(1, 3);
    let a0 = 2.0 * c0 * c0 * (c1 - c2);
    let a1 = 2.0 * c1 * c1 * (c0 - c2);
    let a2 = 2.0 * c2 * c2 * (c0 - c1);
    t.set(&[0], p(0, 1), p(0, 2), a0);
    t.set(&[0], p(0, 2), p(0, 1), a0);
    t.set(&[1], p(0, 1), p(1, 2), a1);
    t.set(&[1], p(1, 2), p(0, 1), a1);
    t.set(&[2], p(0, 2), p(1, 2), a2);
    t.set(&[2], p(1, 2), p(0, 2), a2);
    t
}

/// `Rm^k(e_0,…,e_0 | ·)` on `e_0∧e_1`, `e_0∧e_2`, `e_1∧e_2`, as pair
/// coordinates of the `so(3)` values.
pub fn rmk_axis_closed(g: &MilnorMetric, k: usize) -> Result<[[f64; 3]; 3]> {
    if k == 0 {
        return Err(Error::InvalidParameter("axis formula needs k ≥ 1"));
    }
    let [c0, c1, c2] = connection_coefficients(g);
    let magnitude = libm::pow(2.0, k as f64) * libm::pow(c0, (k + 1) as f64) * (c1 - c2);
    let sign = |e: usize| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let b = |j: usize| 1 + j % 2;
    let mut out = [[0.0; 3]; 3];
    out[0][pair_index(3, 0, b(k))] = sign((k - 1) / 2) * magnitude;
    out[1][pair_index(3, 0, b(k + 1))] = sign(k / 2) * magnitude;
    Ok(out)
}

/// Reads the same axis line from a computed tensor.
pub fn rmk_axis(t: &CurvatureDerivative) -> [[f64; 3]; 3] {
    let slots = alloc::vec![0usize; t.order()];
    let mut out = [[0.0; 3]; 3];
    for (row, p) in out.iter_mut().zip(0..3) {
        for (v, o) in row.iter_mut().enumerate() {
            *o = t.get(&slots, p, v);
        }
    }
    out
}

/// The family with `λ_1 = 1 − δ/2`, `λ_2 = 1 + δ/2`, written directly.
pub fn star_family(eps: f64, delta: f64) -> Result<Bracket> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("ε must be positive"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter("δ must lie in [0, 1)"));
    }
    Bracket::from_entries(
        0,
        3,
        &[
            (
                0,
                1,
                2,
                -2.0 * sqrt((1.0 / eps) * (2.0 + delta) / (2.0 - delta)),
            ),
            (
                0,
                2,
                1,
                2.0 * sqrt((1.0 / eps) * (2.0 - delta) / (2.0 + delta)),
            ),
            (1, 2, 0, -2.0 * sqrt(4.0 * eps / (4.0 - delta * delta))),
        ],
    )
}

/// `(c, exponent)` describing `c · n^{−exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coef: f64,
    pub exponent: Ratio<i64>,
}

impl PowerLaw {
    pub fn eval(&self, n: f64) -> f64 {
        let e = *self.exponent.numer() as f64 / *self.exponent.denom() as f64;
        self.coef * libm::pow(n, -e)
    }
}

/// `ε^(n) = c_ε n^{−p}` and `|λ_1 − λ_2|^(n) = c_δ n^{−r}`, split
/// symmetrically around `limit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFamily {
    pub eps: PowerLaw,
    pub gap: PowerLaw,
    pub limit: f64,
}

impl PowerLawFamily {
    pub fn new(eps: PowerLaw, gap: PowerLaw, limit: f64) -> Result<Self> {
        let zero = Ratio::from_integer(0);
        if eps.coef.is_nan() || eps.coef <= 0.0 || eps.exponent <= zero {
            return Err(Error::InvalidParameter("ε-law needs c_ε > 0 and p > 0"));
        }
        if gap.coef < 0.0 || !gap.coef.is_finite() {
            return Err(Error::InvalidParameter(
                "gap coefficient must be non-negative",
            ));
        }
        if gap.coef > 0.0 && gap.exponent <= zero {
            return Err(Error::InvalidParameter("gap-law needs r > 0 when c_δ > 0"));
        }
        if limit.is_nan() || limit <= 0.0 {
            return Err(Error::InvalidParameter("limit must be positive"));
        }
        Ok(PowerLawFamily { eps, gap, limit })
    }

    /// `ε = n^{−2}`, gap `n^{−r}`, limit 1.
    pub fn inverse_square(gap_exponent: Ratio<i64>) -> Self {
        PowerLawFamily {
            eps: PowerLaw {
                coef: 1.0,
                exponent: Ratio::from_integer(2),
            },
            gap: PowerLaw {
                coef: 1.0,
                exponent: gap_exponent,
            },
            limit: 1.0,
        }
    }

    /// Sequence whose top bounded order is `s`: `ε = n^{−2}`, gap `n^{−(s+5/2)}`.
    pub fn bounded_through(s: i64) -> Self {
        Self::inverse_square(Ratio::new(2 * s + 5, 2))
    }

    /// Sequence with regularity index `k`: `ε = n^{−2}`, gap `n^{−(k+1)}`.
    pub fn with_index(k: i64) -> Self {
        Self::inverse_square(Ratio::from_integer(k + 1))
    }

    pub fn gap_at(&self, n: f64) -> f64 {
        self.gap.eval(n)
    }

    pub fn metric(&self, n: f64) -> Result<MilnorMetric> {
        let gap = self.gap.eval(n);
        MilnorMetric::new(
            self.eps.eval(n),
            self.limit - 0.5 * gap,
            self.limit + 0.5 * gap,
        )
    }

    pub fn bracket(&self, n: f64) -> Result<Bracket> {
        Ok(milnor_bracket(&self.metric(n)?))
    }
}

/// Largest `k` with `ε^{−k/2}|λ_1−λ_2| → 0`, or infinity for an exact Berger family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityIndex {
    Finite(i64),
    Infinite,
}

/// Exact index from the exponents: the largest integer `k` with `k·p/2 < r`.
pub fn regularity_index(f: &PowerLawFamily) -> RegularityIndex {
    if f.gap.coef == 0.0 {
        return RegularityIndex::Infinite;
    }
    // k p / 2 < r  ⟺  k < 2r/p
    let bound = f.gap.exponent * Ratio::from_integer(2) / f.eps.exponent;
    RegularityIndex::Finite(bound.ceil().to_integer() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseRow {
    pub n: f64,
    pub k: usize,
    pub norm: f64,
    /// `ε^{1/2} + ε^{−(k+2)/2}|λ_1−λ_2|`.
    pub envelope: f64,
    /// `2^{2(k+1)} ε^{−(k+2)/2}|λ_1−λ_2|`.
    pub axis_bound: f64,
}

/// Rows for one `n`, orders `0..=k_max`.
pub fn collapse_rows(
    f: &PowerLawFamily,
    n: f64,
    k_max: usize,
    cfg: &EngineConfig,
) -> Result<Vec<CollapseRow>> {
    let g = f.metric(n)?;
    let gap = f.gap_at(n);
    let tower = curvature_tower_with(&milnor_bracket(&g), k_max, cfg)?;
    Ok(tower
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let blow = libm::pow(g.eps, -((k + 2) as f64) / 2.0) * gap;
            CollapseRow {
                n,
                k,
                norm: t.norm(),
                envelope: sqrt(g.eps) + blow,
                axis_bound: libm::pow(2.0, 2.0 * (k + 1) as f64) * blow,
            }
        })
        .collect())
}

/// Table of `|Rm^k(μ^(n))|` ordered by `n`, then `k`.
pub fn collapse_table(
    f: &PowerLawFamily,
    n_values: &[f64],
    k_max: usize,
) -> Result<Vec<CollapseRow>> {
    let cfg = EngineConfig::default();
    let mut out = Vec::with_capacity(n_values.len() * (k_max + 1));
    for &n in n_values {
        out.extend(collapse_rows(f, n, k_max, &cfg)?);
    }
    Ok(out)
}

/// Least-squares slope of `log(norm)` against `log(n)` for each order; `None`
/// where fewer than two positive norms exist.
pub fn log_log_slopes(rows: &[CollapseRow], k_max: usize) -> Vec<Option<f64>> {
    (0..=k_max)
        .map(|k| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.k == k && r.norm > 0.0 && r.n > 0.0)
                .map(|r| (libm::log(r.n), libm::log(r.norm)))
                .collect();
            if pts.len() < 2 {
                return None;
            }
            let len = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            if sxx == 0.0 {
                None
            } else {
                Some(sxy / sxx)
            }
        })
        .collect()
}
