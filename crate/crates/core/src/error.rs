use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimensions out of range: q = {q}, m = {m} (need m >= 1 and q <= m(m-1)/2)")]
    DimensionOutOfRange { q: usize, m: usize },
    #[error("coefficient array has length {got}, expected {expected}")]
    CoefficientLength { got: usize, expected: usize },
    #[error("index ({i}, {j}, {k}) out of range for a bracket of dimension {dim}")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        k: usize,
        dim: usize,
    },
    #[error("bracket coefficients are not antisymmetric (residual {0:e})")]
    NotAntisymmetric(f64),
    #[error("diagonal entry ({0}, {0}) of a bracket must vanish")]
    DiagonalEntry(usize),
    #[error("restriction is undefined unless (h1) and (h2) hold")]
    RestrictionUndefined,
    #[error("isotropy action is not skew-symmetric on the base block (residual {0:e})")]
    IsotropyNotSkew(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("base dimension m = {m} exceeds the engine cap {cap}")]
    DimensionCap { m: usize, cap: usize },
    #[error("order {order} at m = {m} needs {entries} coefficients, above the budget {budget}")]
    EntryBudget {
        order: usize,
        m: usize,
        entries: usize,
        budget: usize,
    },
    #[error("top order s = {s} is below the Singer bound i(m)+2 = {required} for m = {m}")]
    OrderTooSmall { s: usize, m: usize, required: usize },
    #[error("requested order {requested} exceeds the available order {available}")]
    OrderUnavailable { requested: usize, available: usize },
    #[error("plane vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("parameter out of range: {0}")]
    InvalidParameter(&'static str),
    #[error("interpolation node set is rank deficient ({rank} < {needed})")]
    RankDeficientNodes { rank: usize, needed: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
