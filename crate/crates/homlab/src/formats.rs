//! JSON encodings of brackets, curvature tensors and metric jets.

use homlab_core::linalg::pair_index;
use homlab_core::normal::MetricJet;
use homlab_core::{Bracket, CurvatureDerivative};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{"q", "m", "coeff": [[i, j, k, value], ...]}` with `i < j` only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketJson {
    pub q: usize,
    pub m: usize,
    pub coeff: Vec<(usize, usize, usize, f64)>,
}

impl BracketJson {
    /// Nonzero coefficients of `b` with `i < j`, in index order.
    pub fn from_bracket(b: &Bracket) -> Self {
        let n = b.dim();
        let mut coeff = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = b.get(i, j, k);
                    if v != 0.0 {
                        coeff.push((i, j, k, v));
                    }
                }
            }
        }
        BracketJson {
            q: b.q(),
            m: b.m(),
            coeff,
        }
    }

    /// Builds the antisymmetric bracket; rejects entries with `i ≥ j` and
    /// repeated `(i, j, k)`.
    pub fn to_bracket(&self) -> Result<Bracket, CliError> {
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j, k, v) in &self.coeff {
            if i >= j {
                return Err(CliError::Validation(format!(
                    "bracket entry ({i}, {j}, {k}) must have i < j"
                )));
            }
            if !v.is_finite() {
                return Err(CliError::Validation(format!(
                    "bracket entry ({i}, {j}, {k}) is not finite"
                )));
            }
            if !seen.insert((i, j, k)) {
                return Err(CliError::Validation(format!(
                    "bracket entry ({i}, {j}, {k}) is listed twice"
                )));
            }
        }
        Ok(Bracket::from_entries(self.q, self.m, &self.coeff)?)
    }
}

/// Dense row-major export of a curvature derivative of order `k`.
///
/// `data` has shape `[m; k + 4]` with index order `(x_1, …, x_k, a, b, c, d)`
/// and value `⟨T(e_{x_1}, …, e_{x_k} | e_a ∧ e_b) e_c, e_d⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub order: usize,
    pub m: usize,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl TensorJson {
    pub fn from_tensor(t: &CurvatureDerivative) -> Self {
        let (k, m) = (t.order(), t.m());
        let shape = vec![m; k + 4];
        let total = m.pow((k + 4) as u32);
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; k + 4];
        for _ in 0..total {
            let (slots, tail) = idx.split_at(k);
            data.push(t.component(slots, tail[0], tail[1], tail[2], tail[3]));
            for pos in (0..k + 4).rev() {
                idx[pos] += 1;
                if idx[pos] < m {
                    break;
                }
                idx[pos] = 0;
            }
        }
        TensorJson {
            order: k,
            m,
            shape,
            data,
        }
    }

    /// Reads the pair coordinates back, rejecting dense data that is not
    /// skew in `(a, b)` and in `(c, d)` within `tol` times its largest entry.
    pub fn to_tensor(&self, tol: f64) -> Result<CurvatureDerivative, CliError> {
        let (k, m) = (self.order, self.m);
        if m == 0 || self.shape != vec![m; k + 4] {
            return Err(CliError::Validation(format!(
                "tensor shape {:?} does not match order {k} and m = {m}",
                self.shape
            )));
        }
        if self.data.len() != m.pow((k + 4) as u32) {
            return Err(CliError::Validation(format!(
                "tensor data has {} entries, expected {}",
                self.data.len(),
                m.pow((k + 4) as u32)
            )));
        }
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(1.0);
        let at = |slot: usize, a: usize, b: usize, c: usize, d: usize| {
            self.data[(((slot * m + a) * m + b) * m + c) * m + d]
        };
        let blocks = m.pow(k as u32);
        let mut out = CurvatureDerivative::zeros(k, m);
        let mut slots = vec![0usize; k];
        for slot in 0..blocks {
            let mut rest = slot;
            for pos in (0..k).rev() {
                slots[pos] = rest % m;
                rest /= m;
            }
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let v = at(slot, a, b, c, d);
                            let skew = (v + at(slot, b, a, c, d))
                                .abs()
                                .max((v + at(slot, a, b, d, c)).abs());
                            if skew > tol * scale {
                                return Err(CliError::Validation(format!(
                                    "tensor data is not skew at slot block {slot}, indices ({a}, {b}, {c}, {d})"
                                )));
                            }
                            if a < b && c < d {
                                out.set(&slots, pair_index(m, a, b), pair_index(m, c, d), v);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One coefficient `∂^q g_ij(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetEntry {
    pub i: usize,
    pub j: usize,
    pub q: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricJetJson {
    pub m: usize,
    pub order: usize,
    pub entries: Vec<JetEntry>,
}

impl MetricJetJson {
    pub fn from_jet(jet: &MetricJet) -> Self {
        let m = jet.m;
        let mut entries = Vec::new();
        for block in &jet.blocks {
            for (qi, q) in block.monomials.iter().enumerate() {
                for i in 0..m {
                    for j in 0..m {
                        entries.push(JetEntry {
                            i,
                            j,
                            q: q.clone(),
                            value: block.values[(qi * m + i) * m + j],
                        });
                    }
                }
            }
        }
        MetricJetJson {
            m,
            order: jet.order,
            entries,
        }
    }
}
