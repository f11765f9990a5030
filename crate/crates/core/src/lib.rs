//! Curvature numerics for locally homogeneous Riemannian spaces encoded by
//! Lie brackets `μ` on `R^q ⊕ R^m`.
//!
//! The crate is `no_std` with `alloc`. Modules, bottom-up:
//!
//! - [`bracket`]: storage, validity checks, restriction, scaling, splitting.
//! - [`tensor`]: dense curvature-derivative tensors and their `so(m)` actions.
//! - [`curvature`]: the connection operator and the tower `Rm^k`.
//! - [`verifier`]: tuple identities, Singer invariant, Killing generators,
//!   orbit distances.
//! - [`su2`]: closed forms and collapsing families on `SU(2)`.
//! - [`normal`]: normal-coordinate metric jets.
//! - [`fixtures`]: reference brackets.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bracket;
pub mod curvature;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod normal;
pub mod su2;
pub mod tensor;
pub mod verifier;

pub use bracket::{restrict, scale, split, validate, Bracket, BracketSplit, ValidityReport};
pub use curvature::{
    curvature_base, curvature_derive, curvature_tower, curvature_tower_with, curvature_tuple,
    curvature_tuple_with, derivation_act, max_abs_sec, nomizu_connection, sectional_curvature,
    ConnectionOperator, EngineConfig,
};
pub use error::{Error, Result};
pub use normal::{
    jacobi_jet, lauret_gap, metric_taylor, radial_curvature_ops, radial_metric_jet, LauretGap,
    MetricJet, RadialJet,
};
pub use su2::{
    collapse_table, milnor_bracket, regularity_index, rm1_closed, rmk_axis_closed, star_family,
    su2_invariants, MilnorMetric, PowerLaw, PowerLawFamily, RegularityIndex,
};
pub use tensor::CurvatureDerivative;
pub use verifier::{
    check_r1, check_r2, nomizu_algebra, singer_bound, singer_invariant, tuple_distance,
    NomizuBasis, OrbitBudget, OrbitResult, R1Residuals, R2Report, RiemannTuple, SingerReport,
    SubspaceTolerances,
};
