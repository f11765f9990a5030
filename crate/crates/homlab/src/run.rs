//! Command implementations behind [`run_config`].

use std::path::{Path, PathBuf};

use homlab_core::su2::{collapse_rows, log_log_slopes, CollapseRow};
use homlab_core::{
    check_r1, check_r2, curvature_tower, curvature_tuple, lauret_gap, max_abs_sec, metric_taylor,
    nomizu_algebra, radial_metric_jet, regularity_index, restrict, sectional_curvature,
    singer_bound, singer_invariant, tuple_distance, validate, Bracket, EngineConfig,
    RegularityIndex, RiemannTuple,
};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::formats::{BracketJson, MetricJetJson, TensorJson};
use crate::report::{write_json, Envelope, Table};

/// Files written by a run, plus the failure that sets a non-zero exit code
/// after the reports were written.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub failure: Option<CliError>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, CliError::exit_code)
    }
}

/// Thread count from `HOMLAB_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("HOMLAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "HOMLAB_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs one configured experiment, writing reports under `out_dir`.
/// `base` resolves relative `bracket_file` paths.
pub fn run_config(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    cfg.check()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut run = Run {
        cfg,
        base,
        out_dir,
        files: Vec::new(),
    };
    let failure = pool.install(|| match cfg.command {
        Command::Validate => run.validate(),
        Command::Curvature => run.curvature(),
        Command::Tuple => run.tuple(),
        Command::Singer => run.singer(),
        Command::Nomizu => run.nomizu(),
        Command::Distance => run.distance(),
        Command::Collapse => run.collapse(),
        Command::NormalJet => run.normal_jet(),
        Command::LauretGap => run.lauret_gap(),
    })?;
    Ok(RunOutcome {
        files: run.files,
        failure,
    })
}

type Step = Result<Option<CliError>, CliError>;

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    base: &'a Path,
    out_dir: &'a Path,
    files: Vec<PathBuf>,
}

fn matrix_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect()
}

#[derive(Serialize)]
struct ValidateResult {
    valid: bool,
    h1: bool,
    h2: bool,
    h3: bool,
    jacobi_residual: f64,
    block_residual: f64,
    skew_residual: f64,
    degenerate_subspace_dim: usize,
    /// Present when only (h3) fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    restricted: Option<BracketJson>,
}

#[derive(Serialize)]
struct NormRow {
    k: usize,
    norm: f64,
}

#[derive(Serialize)]
struct SectionalRow {
    i: usize,
    j: usize,
    sectional: f64,
}

#[derive(Serialize)]
struct CurvatureResult {
    q: usize,
    m: usize,
    k_max: usize,
    max_abs_sectional: f64,
    norms: Vec<f64>,
    tensors: Vec<TensorJson>,
}

#[derive(Serialize)]
struct R1Json {
    residuals: [f64; 6],
    max: f64,
    pass: bool,
}

#[derive(Serialize)]
struct InclusionJson {
    k: usize,
    residual: f64,
    ok: bool,
}

#[derive(Serialize)]
struct StabilizationJson {
    k: usize,
    kernel_dim: usize,
    next_kernel_dim: usize,
    ok: bool,
}

#[derive(Serialize)]
struct R2Json {
    inclusions: Vec<InclusionJson>,
    stabilization: Vec<StabilizationJson>,
    pass: bool,
}

#[derive(Serialize)]
struct TupleResult {
    s: usize,
    length_scale: f64,
    pass: bool,
    r1: R1Json,
    r2: R2Json,
    tuple: Vec<TensorJson>,
}

#[derive(Serialize)]
struct SingerResult {
    s: usize,
    bound: usize,
    kernels: Vec<usize>,
    singer_k: Option<usize>,
    stabilized: bool,
}

#[derive(Serialize)]
struct GeneratorJson {
    v: Vec<f64>,
    a: Vec<f64>,
}

#[derive(Serialize)]
struct NomizuResult {
    s: usize,
    dim: usize,
    previous_dim: usize,
    stabilized: bool,
    closure_residual: f64,
    generators: Vec<GeneratorJson>,
}

#[derive(Serialize)]
struct DistanceResult {
    s: usize,
    weights: Vec<f64>,
    distance: f64,
    converged: bool,
    starts: usize,
    aligner: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct DistanceRow {
    n: f64,
    s: usize,
    distance: f64,
}

#[derive(Serialize)]
struct SweepPoint {
    n: f64,
    distance: f64,
    converged: bool,
}

#[derive(Serialize)]
struct DistanceSweep {
    s: usize,
    weights: Vec<f64>,
    points: Vec<SweepPoint>,
}

#[derive(Serialize)]
struct CollapseCsvRow {
    n: f64,
    k: usize,
    norm: f64,
    envelope: f64,
    axis_bound: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum IndexJson {
    Finite(i64),
    Infinite(&'static str),
}

#[derive(Serialize)]
struct SlopeJson {
    k: usize,
    slope: Option<f64>,
}

#[derive(Serialize)]
struct SecJson {
    n: f64,
    max_abs_sectional: f64,
}

#[derive(Serialize)]
struct CollapseSummary {
    k_max: usize,
    scale: f64,
    regularity_index: IndexJson,
    slopes: Vec<SlopeJson>,
    max_abs_sectional: Vec<SecJson>,
}

#[derive(Serialize)]
struct RadialJson {
    direction: Vec<f64>,
    transverse: Vec<f64>,
    jacobi_jets: Vec<Vec<f64>>,
    f_derivs: Vec<f64>,
}

#[derive(Serialize)]
struct NormalJetResult {
    s: usize,
    metric_jet: MetricJetJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    radial: Option<RadialJson>,
}

#[derive(Serialize)]
struct GapResult {
    s: usize,
    order: usize,
    aligned: f64,
    unaligned: f64,
    aligner: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct GapRow {
    n: f64,
    order: usize,
    aligned: f64,
    unaligned: f64,
}

const NORM_COLUMNS: &[(&str, &str)] = &[
    ("k", "derivative order"),
    ("norm", "Frobenius norm of Rm^k"),
];
const SECTIONAL_COLUMNS: &[(&str, &str)] = &[
    ("i", "first basis vector"),
    ("j", "second basis vector"),
    ("sectional", "sectional curvature of span(e_i, e_j)"),
];
const DISTANCE_COLUMNS: &[(&str, &str)] = &[
    ("n", "sequence index"),
    ("s", "top derivative order"),
    (
        "distance",
        "weighted O(m)-orbit distance to the reference tuple",
    ),
];
const COLLAPSE_COLUMNS: &[(&str, &str)] = &[
    ("n", "sequence index"),
    ("k", "derivative order"),
    ("norm", "Frobenius norm of Rm^k"),
    ("envelope", "eps^(1/2) + eps^(-(k+2)/2)|l1-l2|, rescaled"),
    ("axis_bound", "2^(2(k+1)) eps^(-(k+2)/2)|l1-l2|, rescaled"),
];
const GAP_COLUMNS: &[(&str, &str)] = &[
    ("n", "sequence index"),
    ("order", "jet order K"),
    ("aligned", "max coefficient gap after orbit alignment"),
    ("unaligned", "max coefficient gap without alignment"),
];

impl Run<'_> {
    fn json<T: Serialize>(&mut self, result: T) -> Result<(), CliError> {
        let path = self
            .out_dir
            .join(format!("{}.json", self.cfg.command.stem()));
        write_json(&path, &Envelope::new(self.cfg, result))?;
        self.files.push(path);
        Ok(())
    }

    fn csv<R: Serialize>(
        &mut self,
        name: &str,
        columns: &[(&str, &str)],
        rows: &[R],
    ) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        Table { columns }.write(&path, rows)?;
        self.files.push(path);
        Ok(())
    }

    fn bracket(&self) -> Result<Bracket, CliError> {
        let b = self.cfg.source().load(self.base)?;
        let rep = validate(&b, self.cfg.tolerances.validity)?;
        if !rep.is_valid() {
            return Err(CliError::Validation(format!(
                "bracket fails (h1) {} (h2) {} (h3) {}; run validate for details",
                rep.h1_ok, rep.h2_ok, rep.h3_ok
            )));
        }
        Ok(b)
    }

    fn reference(&self) -> Result<Bracket, CliError> {
        let src = self.cfg.reference.as_ref().expect("checked by config");
        let b = src.load(self.base)?;
        if !validate(&b, self.cfg.tolerances.validity)?.is_valid() {
            return Err(CliError::Validation(
                "reference bracket is not valid".into(),
            ));
        }
        Ok(b)
    }

    fn order(&self, m: usize) -> usize {
        self.cfg.s.unwrap_or(singer_bound(m) + 2)
    }

    fn tuple_of(&self, b: &Bracket) -> Result<(usize, RiemannTuple), CliError> {
        let s = self.order(b.m());
        Ok((s, curvature_tuple(b, s)?))
    }

    fn validate(&mut self) -> Step {
        let b = self.cfg.source().load(self.base)?;
        let tol = self.cfg.tolerances.validity;
        let rep = validate(&b, tol)?;
        let restricted = if rep.h1_ok && rep.h2_ok && !rep.h3_ok {
            Some(BracketJson::from_bracket(&restrict(&b, tol)?))
        } else {
            None
        };
        let valid = rep.is_valid();
        self.json(ValidateResult {
            valid,
            h1: rep.h1_ok,
            h2: rep.h2_ok,
            h3: rep.h3_ok,
            jacobi_residual: rep.jacobi_residual,
            block_residual: rep.block_residual,
            skew_residual: rep.skew_residual,
            degenerate_subspace_dim: rep.degenerate_subspace_dim,
            restricted,
        })?;
        Ok((!valid).then(|| {
            CliError::Validation("bracket is not a valid orthogonal transitive algebra".into())
        }))
    }

    fn curvature(&mut self) -> Step {
        let b = self.bracket()?;
        let k_max = self.cfg.k_max.or(self.cfg.s).unwrap_or(3);
        let tower = curvature_tower(&b, k_max)?;
        let m = b.m();
        let mut sec = Vec::new();
        let mut e = vec![vec![0.0; m]; m];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for i in 0..m {
            for j in i + 1..m {
                sec.push(SectionalRow {
                    i,
                    j,
                    sectional: sectional_curvature(&tower[0], &e[i], &e[j])?,
                });
            }
        }
        let norms: Vec<NormRow> = tower
            .iter()
            .enumerate()
            .map(|(k, t)| NormRow { k, norm: t.norm() })
            .collect();
        self.csv("curvature_norms.csv", NORM_COLUMNS, &norms)?;
        self.csv("sectional.csv", SECTIONAL_COLUMNS, &sec)?;
        self.json(CurvatureResult {
            q: b.q(),
            m,
            k_max,
            max_abs_sectional: max_abs_sec(&tower[0]),
            norms: norms.iter().map(|r| r.norm).collect(),
            tensors: tower.iter().map(TensorJson::from_tensor).collect(),
        })?;
        Ok(None)
    }

    fn tuple(&mut self) -> Step {
        let b = self.bracket()?;
        let (s, t) = self.tuple_of(&b)?;
        let r1 = check_r1(&t);
        let r2 = check_r2(&t, &self.cfg.tolerances.subspaces());
        let r1_pass = r1.passes(self.cfg.tolerances.identities);
        let pass = r1_pass && r2.passes();
        self.json(TupleResult {
            s,
            length_scale: t.length_scale(),
            pass,
            r1: R1Json {
                residuals: r1.residuals,
                max: r1.max(),
                pass: r1_pass,
            },
            r2: R2Json {
                pass: r2.passes(),
                inclusions: r2
                    .inclusions
                    .iter()
                    .map(|c| InclusionJson {
                        k: c.k,
                        residual: c.residual,
                        ok: c.ok,
                    })
                    .collect(),
                stabilization: r2
                    .stabilization
                    .iter()
                    .map(|c| StabilizationJson {
                        k: c.k,
                        kernel_dim: c.kernel_dim,
                        next_kernel_dim: c.next_kernel_dim,
                        ok: c.ok,
                    })
                    .collect(),
            },
            tuple: t.entries().iter().map(TensorJson::from_tensor).collect(),
        })?;
        Ok((!pass).then(|| CliError::Validation("tuple fails (R1) or (R2)".into())))
    }

    fn singer(&mut self) -> Step {
        let b = self.bracket()?;
        let (s, t) = self.tuple_of(&b)?;
        let rep = singer_invariant(&t, &self.cfg.tolerances.subspaces());
        self.json(SingerResult {
            s,
            bound: singer_bound(b.m()),
            kernels: rep.kernels,
            singer_k: rep.singer_k,
            stabilized: rep.stabilized,
        })?;
        Ok(None)
    }

    fn nomizu(&mut self) -> Step {
        let b = self.bracket()?;
        let (s, t) = self.tuple_of(&b)?;
        let nb = nomizu_algebra(&t, &self.cfg.tolerances.subspaces());
        self.json(NomizuResult {
            s,
            dim: nb.dim,
            previous_dim: nb.previous_dim,
            stabilized: nb.stabilized,
            closure_residual: nb.closure_residual,
            generators: nb
                .generators
                .into_iter()
                .map(|g| GeneratorJson { v: g.v, a: g.a })
                .collect(),
        })?;
        Ok(None)
    }

    fn weights(&self, s: usize) -> Result<Vec<f64>, CliError> {
        match &self.cfg.weights {
            None => Ok(vec![1.0; s + 1]),
            Some(w) if w.len() == s + 1 => Ok(w.clone()),
            Some(w) => Err(CliError::Validation(format!(
                "weights has {} entries, expected s + 1 = {}",
                w.len(),
                s + 1
            ))),
        }
    }

    fn sweep_brackets(&self) -> Result<Vec<(f64, Bracket)>, CliError> {
        let fam = self.cfg.family.as_ref().expect("checked by config");
        self.cfg
            .n_values
            .iter()
            .map(|&n| Ok((n, fam.bracket(n)?)))
            .collect()
    }

    fn distance(&mut self) -> Step {
        let r = self.reference()?;
        let (s, tr) = self.tuple_of(&r)?;
        let w = self.weights(s)?;
        let budget = self.cfg.orbit_budget();
        if self.cfg.family.is_none() {
            let (_, t) = self.tuple_of(&self.bracket()?)?;
            let res = tuple_distance(&t, &tr, &w, &budget)?;
            let converged = res.converged;
            self.json(DistanceResult {
                s,
                weights: w,
                distance: res.distance,
                converged,
                starts: res.starts,
                aligner: matrix_rows(&res.aligner),
            })?;
            return Ok(
                (!converged).then(|| CliError::Budget("orbit search did not converge".into()))
            );
        }
        let members = self.sweep_brackets()?;
        let points = members
            .par_iter()
            .map(|(n, b)| {
                let t = curvature_tuple(b, s)?;
                let res = tuple_distance(&t, &tr, &w, &budget)?;
                Ok(SweepPoint {
                    n: *n,
                    distance: res.distance,
                    converged: res.converged,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let rows: Vec<DistanceRow> = points
            .iter()
            .map(|p| DistanceRow {
                n: p.n,
                s,
                distance: p.distance,
            })
            .collect();
        self.csv("distance.csv", DISTANCE_COLUMNS, &rows)?;
        let stalled: Vec<f64> = points
            .iter()
            .filter(|p| !p.converged)
            .map(|p| p.n)
            .collect();
        self.json(DistanceSweep {
            s,
            weights: w,
            points,
        })?;
        Ok((!stalled.is_empty())
            .then(|| CliError::Budget(format!("orbit search did not converge at n = {stalled:?}"))))
    }

    fn collapse(&mut self) -> Step {
        let spec = self.cfg.family.as_ref().expect("checked by config");
        let fam = spec.family()?;
        let k_max = self
            .cfg
            .k_max
            .ok_or_else(|| CliError::Validation("collapse needs k_max".into()))?;
        let r = spec.scale;
        let cfg = EngineConfig::default();
        let per_n = self
            .cfg
            .n_values
            .par_iter()
            .map(|&n| {
                let b = spec.bracket(n)?;
                let tower = curvature_tower(&b, k_max)?;
                let shape = collapse_rows(&fam, n, k_max, &cfg)?;
                let rows: Vec<CollapseRow> = shape
                    .into_iter()
                    .zip(&tower)
                    .map(|(row, t)| {
                        let f = r.powi(-(row.k as i32 + 2));
                        CollapseRow {
                            norm: t.norm(),
                            envelope: row.envelope * f,
                            axis_bound: row.axis_bound * f,
                            ..row
                        }
                    })
                    .collect();
                Ok((rows, max_abs_sec(&tower[0])))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let rows: Vec<CollapseRow> = per_n.iter().flat_map(|p| p.0.iter().copied()).collect();
        let csv_rows: Vec<CollapseCsvRow> = rows
            .iter()
            .map(|r| CollapseCsvRow {
                n: r.n,
                k: r.k,
                norm: r.norm,
                envelope: r.envelope,
                axis_bound: r.axis_bound,
            })
            .collect();
        self.csv("collapse.csv", COLLAPSE_COLUMNS, &csv_rows)?;
        let slopes = log_log_slopes(&rows, k_max)
            .into_iter()
            .enumerate()
            .map(|(k, slope)| SlopeJson { k, slope })
            .collect();
        self.json(CollapseSummary {
            k_max,
            scale: r,
            regularity_index: match regularity_index(&fam) {
                RegularityIndex::Finite(k) => IndexJson::Finite(k),
                RegularityIndex::Infinite => IndexJson::Infinite("infinite"),
            },
            slopes,
            max_abs_sectional: self
                .cfg
                .n_values
                .iter()
                .zip(&per_n)
                .map(|(&n, p)| SecJson {
                    n,
                    max_abs_sectional: p.1,
                })
                .collect(),
        })?;
        Ok(None)
    }

    fn normal_jet(&mut self) -> Step {
        let b = self.bracket()?;
        let (s, t) = self.tuple_of(&b)?;
        let order = self.cfg.jet_order.unwrap_or(s);
        let jet = metric_taylor(&t, order)?;
        let radial = match (&self.cfg.direction, &self.cfg.transverse) {
            (Some(y), Some(w)) => {
                let rj = radial_metric_jet(&t, y, w, order.min(s))?;
                Some(RadialJson {
                    direction: rj.direction,
                    transverse: rj.transverse,
                    jacobi_jets: rj.jacobi_jets,
                    f_derivs: rj.f_derivs,
                })
            }
            (None, None) => None,
            _ => {
                return Err(CliError::Validation(
                    "direction and transverse must be given together".into(),
                ))
            }
        };
        self.json(NormalJetResult {
            s,
            metric_jet: MetricJetJson::from_jet(&jet),
            radial,
        })?;
        Ok(None)
    }

    fn lauret_gap(&mut self) -> Step {
        let r = self.reference()?;
        let (s, tr) = self.tuple_of(&r)?;
        let order = self.cfg.jet_order.unwrap_or(s.min(4));
        let budget = self.cfg.orbit_budget();
        if self.cfg.family.is_none() {
            let (_, t) = self.tuple_of(&self.bracket()?)?;
            let gap = lauret_gap(&t, &tr, order, &budget)?;
            self.json(GapResult {
                s,
                order,
                aligned: gap.aligned,
                unaligned: gap.unaligned,
                aligner: matrix_rows(&gap.aligner),
            })?;
            return Ok(None);
        }
        let members = self.sweep_brackets()?;
        let rows = members
            .par_iter()
            .map(|(n, b)| {
                let t = curvature_tuple(b, s)?;
                let gap = lauret_gap(&t, &tr, order, &budget)?;
                Ok(GapRow {
                    n: *n,
                    order,
                    aligned: gap.aligned,
                    unaligned: gap.unaligned,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        self.csv("lauret_gap.csv", GAP_COLUMNS, &rows)?;
        self.json(rows)?;
        Ok(None)
    }
}
