//! The single JSON configuration that drives a run.

use std::path::{Path, PathBuf};

use homlab_core::bracket::DEFAULT_TOL;
use homlab_core::su2::{PowerLaw, PowerLawFamily};
use homlab_core::{
    fixtures, milnor_bracket, star_family, Bracket, MilnorMetric, OrbitBudget, SubspaceTolerances,
};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::formats::BracketJson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Curvature,
    Tuple,
    Singer,
    Nomizu,
    Distance,
    Collapse,
    NormalJet,
    LauretGap,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Curvature => "curvature",
            Command::Tuple => "tuple",
            Command::Singer => "singer",
            Command::Nomizu => "nomizu",
            Command::Distance => "distance",
            Command::Collapse => "collapse",
            Command::NormalJet => "normal-jet",
            Command::LauretGap => "lauret-gap",
        }
    }

    /// Stem of the report files.
    pub fn stem(self) -> &'static str {
        match self {
            Command::NormalJet => "normal_jet",
            Command::LauretGap => "lauret_gap",
            other => other.name(),
        }
    }
}

/// Built-in brackets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Fixture {
    /// `S²(1/4) × R`, curvature operator `diag(4, 0, 0)`.
    SphereCrossLine,
    RoundSphere,
    Berger {
        eps: f64,
    },
    Milnor {
        eps: f64,
        l1: f64,
        l2: f64,
    },
    /// Milnor metric with `λ_{1,2} = 1 ∓ δ/2`.
    Star {
        eps: f64,
        delta: f64,
    },
    Flat {
        m: usize,
    },
    ConstantCurvaturePlane {
        kappa: f64,
    },
    HyperbolicPlane,
    HyperbolicSpace,
}

impl Fixture {
    pub fn bracket(&self) -> Result<Bracket, CliError> {
        Ok(match *self {
            Fixture::SphereCrossLine => fixtures::sphere_cross_line(),
            Fixture::RoundSphere => fixtures::round_sphere3(),
            Fixture::Berger { eps } => milnor_bracket(&MilnorMetric::new(eps, 1.0, 1.0)?),
            Fixture::Milnor { eps, l1, l2 } => milnor_bracket(&MilnorMetric::new(eps, l1, l2)?),
            Fixture::Star { eps, delta } => star_family(eps, delta)?,
            Fixture::Flat { m } => Bracket::zero(0, m)?,
            Fixture::ConstantCurvaturePlane { kappa } => fixtures::constant_curvature_plane(kappa),
            Fixture::HyperbolicPlane => fixtures::solvable_hyperbolic_plane(),
            Fixture::HyperbolicSpace => fixtures::hyperbolic3(),
        })
    }
}

/// Where a single bracket comes from; exactly one field must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<BracketJson>,
    /// Path to a bracket JSON file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Fixture>,
}

impl Source {
    fn is_empty(&self) -> bool {
        self.bracket.is_none() && self.bracket_file.is_none() && self.fixture.is_none()
    }

    fn count(&self) -> usize {
        self.bracket.is_some() as usize
            + self.bracket_file.is_some() as usize
            + self.fixture.is_some() as usize
    }

    pub fn load(&self, base: &Path) -> Result<Bracket, CliError> {
        match (&self.bracket, &self.bracket_file, &self.fixture) {
            (Some(b), None, None) => b.to_bracket(),
            (None, Some(p), None) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                let json: BracketJson = serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
                json.to_bracket()
            }
            (None, None, Some(f)) => f.bracket(),
            _ => Err(CliError::Validation(
                "exactly one of bracket, bracket_file, fixture is required".into(),
            )),
        }
    }
}

/// `coef · n^{−exponent}`, exponent as a rational string such as `"11/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub coef: f64,
    pub exponent: String,
}

impl LawSpec {
    fn law(&self) -> Result<PowerLaw, CliError> {
        let exponent: Ratio<i64> = self.exponent.trim().parse().map_err(|_| {
            CliError::Validation(format!(
                "exponent {:?} is not a rational number",
                self.exponent
            ))
        })?;
        Ok(PowerLaw {
            coef: self.coef,
            exponent,
        })
    }
}

fn one() -> f64 {
    1.0
}

/// SU(2) family with `ε = c_ε n^{−p}` and `λ_{1,2} = limit ∓ gap/2`,
/// optionally rescaled by a fixed factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub eps: LawSpec,
    pub gap: LawSpec,
    #[serde(default = "one")]
    pub limit: f64,
    /// Every bracket is replaced by `R·μ`, dividing sectional curvature by `R²`.
    #[serde(default = "one")]
    pub scale: f64,
}

impl FamilySpec {
    pub fn family(&self) -> Result<PowerLawFamily, CliError> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(CliError::Validation(format!(
                "family scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(PowerLawFamily::new(
            self.eps.law()?,
            self.gap.law()?,
            self.limit,
        )?)
    }

    pub fn bracket(&self, n: f64) -> Result<Bracket, CliError> {
        let b = self.family()?.bracket(n)?;
        Ok(homlab_core::scale(&b, self.scale)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bracket validity threshold.
    pub validity: f64,
    /// Largest tuple identity residual accepted by `tuple`.
    pub identities: f64,
    /// Relative singular-value threshold for kernels and images.
    pub subspace: f64,
    /// Relative least-squares residual for subspace inclusion.
    pub inclusion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let sub = SubspaceTolerances::default();
        Tolerances {
            validity: DEFAULT_TOL,
            identities: 1e-8,
            subspace: sub.subspace,
            inclusion: sub.inclusion,
        }
    }
}

impl Tolerances {
    pub fn subspaces(&self) -> SubspaceTolerances {
        SubspaceTolerances {
            subspace: self.subspace,
            inclusion: self.inclusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitSpec {
    pub random_starts: usize,
    pub max_iters: usize,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        let b = OrbitBudget::default();
        OrbitSpec {
            random_starts: b.random_starts,
            max_iters: b.max_iters,
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<BracketJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Fixture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    /// Second input for `distance` and `lauret-gap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Source>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// Normal-coordinate jet order `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet_order: Option<usize>,
    /// Radial direction `y` for `normal-jet`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    /// Transverse vector `w` for `normal-jet`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse: Option<Vec<f64>>,
    /// Per-order orbit-distance weights, length `s + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub orbit: OrbitSpec,
    /// Not echoed into reports, so outputs do not depend on where they are written.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads a config file; `bracket_file` paths resolve against its directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg = Self::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn source(&self) -> Source {
        Source {
            bracket: self.bracket.clone(),
            bracket_file: self.bracket_file.clone(),
            fixture: self.fixture.clone(),
        }
    }

    pub fn orbit_budget(&self) -> OrbitBudget {
        OrbitBudget {
            random_starts: self.orbit.random_starts,
            max_iters: self.orbit.max_iters,
            seed: self.seed,
        }
    }

    /// Structural checks that do not need any file or numerics.
    pub fn check(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        let src = self.source();
        if src.count() > 1 {
            return bad("at most one of bracket, bracket_file, fixture may be set".into());
        }
        if let (Some(k), Some(s)) = (self.k_max, self.s) {
            if k > s {
                return bad(format!("k_max = {k} exceeds s = {s}"));
            }
        }
        if self.n_values.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
            return bad("n_values must be positive and finite".into());
        }
        if let Some(r) = &self.reference {
            if r.count() != 1 {
                return bad("reference needs exactly one of bracket, bracket_file, fixture".into());
            }
        }
        let sweep = self.family.is_some();
        match self.command {
            Command::Collapse => {
                if !sweep || !src.is_empty() {
                    return bad("collapse needs a family and no single bracket".into());
                }
            }
            Command::Distance | Command::LauretGap => {
                if self.reference.is_none() {
                    return bad(format!("{} needs a reference", self.command.name()));
                }
                if sweep == !src.is_empty() {
                    return bad(format!(
                        "{} needs either a single bracket or a family with n_values",
                        self.command.name()
                    ));
                }
            }
            _ => {
                if src.is_empty() || sweep {
                    return bad(format!(
                        "{} needs exactly one of bracket, bracket_file, fixture",
                        self.command.name()
                    ));
                }
            }
        }
        Ok(())
    }
}
