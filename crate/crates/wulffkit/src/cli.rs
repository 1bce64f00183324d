//! Batch-verification harness: runs the inequality suites over generated or
//! loaded instances and emits deterministic JSON/CSV reports.
//!
//! Determinism contract: identical `(suite, seed, dim, trials)` produce
//! byte-identical JSON output (the wall-time field excluded) regardless of
//! the parallelism level, because every trial draws from its own RNG stream
//! derived from `(seed, trial index)` and report assembly is order-stable.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ballbarthe::{
    bb_report_lifted, lifted_trace_logcheck, transport_eval, transport_identity_check, Direction,
    TransportSpec,
};
use crate::bodies::{
    support_hull_reports, volume_ratio_reports, gen_random_body, gen_random_symmetric_body,
    ConvexBody,
};
use crate::measures::{
    gen_cube_measure, gen_random_isotropic_fcentered, gen_simplex_measure, splitmix, stream_rng,
    symmetrize, lift, DiscreteMeasure, LiftSign, WeightFn,
};
use crate::report::InequalityReport;
use crate::wulff::{
    build_wulff, equality_case_detect, wulff_volume_report, polar_wulff_volume_report, even_wulff_volume_report, even_polar_wulff_volume_report,
    wulff_volume_refined_report,
};

/// Residual ceiling for the transport log-derivative identities (central
/// differences with step 1e-6 limit the attainable accuracy).
pub const TRANSPORT_IDENTITY_TOL: f64 = 1e-5;
/// Residual ceiling for the transport round trip, which is limited only by
/// the quantile evaluation accuracy.
pub const TRANSPORT_ROUNDTRIP_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("missing or malformed field `{0}`")]
    Field(&'static str),
    #[error("unsupported schema version {0} (expected 1)")]
    Version(i64),
    #[error("field `{field}` has length {got}, expected {want}")]
    Length {
        field: &'static str,
        got: usize,
        want: usize,
    },
    #[error("point {index} has dimension {got}, expected {want}")]
    PointDim {
        index: usize,
        got: usize,
        want: usize,
    },
    #[error("unit norm violated at point {index} (norm {norm})")]
    UnitNorm { index: usize, norm: f64 },
    #[error("weight {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("f value {index} is not positive")]
    NonPositiveF { index: usize },
    #[error("invalid measure: {0}")]
    Measure(String),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Which verification suite to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Refined upper bound and polar lower bound on random instances.
    Wulff,
    /// Even-case bounds on symmetrized random instances.
    EvenWulff,
    /// Determinant inequality and the last-coordinate bound on lifted measures.
    BallBarthe,
    /// Monotone transport map identities and round trip.
    Transport,
    /// Volume-ratio bounds for random convex bodies and direction hulls.
    Corollaries,
    /// Equality configurations: regular simplex and cross-polytope data.
    Extremals,
    /// Every suite above.
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Wulff => "wulff",
            Suite::EvenWulff => "even-wulff",
            Suite::BallBarthe => "ball-barthe",
            Suite::Transport => "transport",
            Suite::Corollaries => "corollaries",
            Suite::Extremals => "extremals",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Wulff,
                Suite::EvenWulff,
                Suite::BallBarthe,
                Suite::Transport,
                Suite::Corollaries,
                Suite::Extremals,
            ],
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved run configuration; the `config` block of the report echoes
/// every field that affects the output.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: Suite,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub eq_tol: f64,
    pub hyp_tol: f64,
    pub solver_tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub measure: Option<PathBuf>,
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(2..=5).contains(&self.dim) {
            return Err(CliError::Config(format!(
                "dimension {} outside the supported range 2..=5",
                self.dim
            )));
        }
        if self.trials < 1 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        for (name, v) in [
            ("eq-tol", self.eq_tol),
            ("hyp-tol", self.hyp_tol),
            ("solver-tol", self.solver_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Config echo embedded in every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub suite: Suite,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub eq_tol: f64,
    pub hyp_tol: f64,
    pub solver_tol: f64,
    pub measure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub suite: String,
    pub trial: u64,
    pub reports: Vec<InequalityReport>,
    /// Solver or hypothesis failures; any entry forces a nonzero exit.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub report_count: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    pub equality_count: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: ConfigEcho,
    pub trials: Vec<TrialReport>,
    pub summary: Summary,
    /// Excluded from the determinism contract.
    pub wall_time_secs: f64,
}

impl SuiteReport {
    pub fn has_failures(&self) -> bool {
        !self.summary.failures.is_empty()
    }
}

/// Support size used for generated instances: the generator minimum plus
/// slack so the nonnegative solve reliably finds a feasible weighting.
fn support_size(n: usize) -> usize {
    n * (n + 3) / 2 + 3 * n
}

fn trial_seed(seed: u64, suite: Suite, trial: u64) -> u64 {
    splitmix(seed ^ splitmix(trial.wrapping_add(1) ^ (suite.name().len() as u64) << 56))
}

fn instance(
    config: &RunConfig,
    suite: Suite,
    trial: u64,
    fixed: Option<&(DiscreteMeasure, WeightFn)>,
    f_range: (f64, f64),
) -> Result<(DiscreteMeasure, WeightFn), String> {
    if let Some((m, f)) = fixed {
        return Ok((m.clone(), f.clone()));
    }
    let n = config.dim;
    gen_random_isotropic_fcentered(n, support_size(n), f_range, trial_seed(config.seed, suite, trial))
        .map_err(|e| format!("instance generation failed: {e}"))
}

fn run_trial(
    config: &RunConfig,
    suite: Suite,
    trial: u64,
    fixed: Option<&(DiscreteMeasure, WeightFn)>,
) -> TrialReport {
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    fn push(
        reports: &mut Vec<InequalityReport>,
        errors: &mut Vec<String>,
        r: Result<InequalityReport, String>,
    ) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push(e),
        }
    }

    match suite {
        Suite::Wulff => match instance(config, suite, trial, fixed, (0.6, 1.4)) {
            Ok((m, f)) => {
                push(&mut reports, &mut errors, wulff_volume_refined_report(&m, &f, config.eq_tol).map_err(|e| e.to_string()));
                push(&mut reports, &mut errors, polar_wulff_volume_report(&m, &f, config.eq_tol).map_err(|e| e.to_string()));
            }
            Err(e) => errors.push(e),
        },
        Suite::EvenWulff => match instance(config, suite, trial, fixed, (0.6, 1.4)) {
            Ok((m, f)) => match symmetrize(&m, &f) {
                Ok((sm, sf)) => {
                    push(&mut reports, &mut errors, even_wulff_volume_report(&sm, &sf, config.eq_tol).map_err(|e| e.to_string()));
                    push(&mut reports, &mut errors, even_polar_wulff_volume_report(&sm, &sf, config.eq_tol).map_err(|e| e.to_string()));
                }
                Err(e) => errors.push(format!("symmetrization failed: {e}")),
            },
            Err(e) => errors.push(e),
        },
        Suite::BallBarthe => match instance(config, suite, trial, fixed, (0.6, 1.4)) {
            Ok((m, f)) => {
                let norm = match f.l2_norm(&m) {
                    Ok(v) => v,
                    Err(e) => {
                        errors.push(e.to_string());
                        return TrialReport {
                            suite: suite.name().into(),
                            trial,
                            reports,
                            errors,
                        };
                    }
                };
                match lift(&m, &f.scaled(1.0 / norm), LiftSign::Plus, config.hyp_tol) {
                    Ok(lm) => {
                        let mut rng =
                            stream_rng(config.seed, splitmix(trial ^ 0x6262_7465)); // distinct stream
                        let t: Vec<f64> =
                            (0..lm.points().len()).map(|_| rng.gen_range(0.5..2.5)).collect();
                        push(&mut reports, &mut errors,                             bb_report_lifted(&lm, &t, config.hyp_tol, config.eq_tol)
                                .map_err(|e| e.to_string()),
                        );
                        push(&mut reports, &mut errors, lifted_trace_logcheck(&lm, config.eq_tol).map_err(|e| e.to_string()));
                    }
                    Err(e) => errors.push(format!("lift failed: {e}")),
                }
            }
            Err(e) => errors.push(e),
        },
        Suite::Transport => {
            let mut rng = stream_rng(config.seed, splitmix(trial ^ 0x7472_616e));
            let a: f64 = rng.gen_range(0.05..=1.0);
            push(&mut reports, &mut errors, transport_suite_reports(a, config.eq_tol).map_err(|e| e.to_string()));
            match transport_roundtrip_report(a, config.eq_tol) {
                Ok(r) => reports.push(r),
                Err(e) => errors.push(e),
            }
            match transport_inverse_report(a, config.eq_tol) {
                Ok(r) => reports.push(r),
                Err(e) => errors.push(e),
            }
        }
        Suite::Corollaries => {
            let n = config.dim;
            let body = if let Some((m, f)) = fixed {
                build_wulff(m, f)
                    .map_err(|e| e.to_string())
                    .and_then(|w| {
                        ConvexBody::from_vpolytope(w.vbody().clone())
                            .and_then(|k| k.centered())
                            .map_err(|e| e.to_string())
                    })
            } else if trial % 2 == 0 {
                gen_random_body(n, 3 * n + 6, trial_seed(config.seed, suite, trial))
                    .and_then(|k| k.centered())
                    .map_err(|e| e.to_string())
            } else {
                gen_random_symmetric_body(n, 2 * n + 4, trial_seed(config.seed, suite, trial))
                    .and_then(|k| k.centered())
                    .map_err(|e| e.to_string())
            };
            match body {
                Ok(k) => match volume_ratio_reports(&k, config.eq_tol) {
                    Ok(rs) => reports.extend(rs),
                    Err(e) => errors.push(format!("volume-ratio reports failed: {e}")),
                },
                Err(e) => errors.push(format!("body generation failed: {e}")),
            }
            // direction-hull bounds need a 1-centered instance (constant f)
            let hull_instance = if fixed.is_some() {
                instance(config, suite, trial, fixed, (1.0, 1.0))
            } else {
                gen_random_isotropic_fcentered(
                    n,
                    support_size(n),
                    (1.0, 1.0),
                    trial_seed(config.seed, suite, trial ^ 0x68756c6c),
                )
                .map_err(|e| format!("instance generation failed: {e}"))
            };
            match hull_instance {
                Ok((m, _)) => match support_hull_reports(&m, config.hyp_tol, config.eq_tol)
                {
                    Ok((up, lo)) => {
                        reports.push(up);
                        reports.push(lo);
                    }
                    Err(e) => errors.push(format!("direction-hull reports failed: {e}")),
                },
                Err(e) => errors.push(e),
            }
        }
        Suite::Extremals => {
            let n = config.dim;
            let (sm, sf) = gen_simplex_measure(n);
            let flags = equality_case_detect(&sm, &sf);
            push(&mut reports, &mut errors,                 wulff_volume_report(&sm, &sf, config.eq_tol)
                    .map(|r| r.with_meta("simplex_extremal_detected", flags.is_simplex_extremal as u8 as f64))
                    .map_err(|e| e.to_string()),
            );
            push(&mut reports, &mut errors, wulff_volume_refined_report(&sm, &sf, config.eq_tol).map_err(|e| e.to_string()));
            push(&mut reports, &mut errors, polar_wulff_volume_report(&sm, &sf, config.eq_tol).map_err(|e| e.to_string()));
            match support_hull_reports(&sm, config.hyp_tol, config.eq_tol) {
                Ok((up, lo)) => {
                    reports.push(up);
                    reports.push(lo);
                }
                Err(e) => errors.push(format!("direction-hull reports failed: {e}")),
            }
            let (cm, cf) = gen_cube_measure(n);
            let cflags = equality_case_detect(&cm, &cf);
            push(&mut reports, &mut errors,                 even_wulff_volume_report(&cm, &cf, config.eq_tol)
                    .map(|r| r.with_meta("cube_extremal_detected", cflags.is_cube_extremal as u8 as f64))
                    .map_err(|e| e.to_string()),
            );
            push(&mut reports, &mut errors, even_polar_wulff_volume_report(&cm, &cf, config.eq_tol).map_err(|e| e.to_string()));
        }
        Suite::All => unreachable!("expanded before dispatch"),
    }

    TrialReport {
        suite: suite.name().into(),
        trial,
        reports,
        errors,
    }
}

/// Forward log-derivative identity residual over a fixed grid, reported
/// against the central-difference ceiling.
fn transport_suite_reports(a: f64, eq_tol: f64) -> Result<InequalityReport, crate::ballbarthe::BbError> {
    let spec = TransportSpec::new(a, Direction::Forward)?;
    let ts: Vec<f64> = (0..20).map(|i| 0.05 + 0.2 * i as f64).collect();
    let res = transport_identity_check(&spec, &ts)?;
    Ok(
        InequalityReport::upper("transport_forward_identity", res, TRANSPORT_IDENTITY_TOL, eq_tol)
            .with_meta("a", a),
    )
}

fn transport_inverse_report(a: f64, eq_tol: f64) -> Result<InequalityReport, String> {
    let spec = TransportSpec::new(a, Direction::Inverse).map_err(|e| e.to_string())?;
    let ts: Vec<f64> = (0..20).map(|i| -2.0 + 4.0 * i as f64 / 19.0).collect();
    let res = transport_identity_check(&spec, &ts).map_err(|e| e.to_string())?;
    Ok(
        InequalityReport::upper("transport_inverse_identity", res, TRANSPORT_IDENTITY_TOL, eq_tol)
            .with_meta("a", a),
    )
}

/// Round trip: the inverse map undoes the forward map after the rate/mean
/// rescaling `t ↦ a²·t`, so `a²·T̂(T(t)) = t` identically.
fn transport_roundtrip_report(a: f64, eq_tol: f64) -> Result<InequalityReport, String> {
    let fwd = TransportSpec::new(a, Direction::Forward).map_err(|e| e.to_string())?;
    let inv = TransportSpec::new(a, Direction::Inverse).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..20 {
        let t = 0.05 + 0.2 * i as f64;
        let back = a * a * transport_eval(&inv, transport_eval(&fwd, t).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst = worst.max((back - t).abs());
    }
    Ok(
        InequalityReport::upper("transport_roundtrip", worst, TRANSPORT_ROUNDTRIP_TOL, eq_tol)
            .with_meta("a", a),
    )
}

/// Relative violation threshold: a report fails when its oriented gap is
/// below `-eq_tol·scale` where `scale = max(|lhs|, |rhs|, 1)`.
fn is_violation(r: &InequalityReport, eq_tol: f64) -> bool {
    let scale = r.lhs.abs().max(r.rhs.abs()).max(1.0);
    r.gap < -eq_tol * scale
}

/// Executes the configured suite and assembles the deterministic report.
pub fn run(config: &RunConfig) -> Result<SuiteReport, CliError> {
    config.validate()?;
    let fixed = match &config.measure {
        Some(p) => Some(load_measure(p)?),
        None => None,
    };
    if let Some((m, _)) = &fixed {
        if m.dim() != config.dim {
            return Err(CliError::Config(format!(
                "measure file has dimension {} but --dim is {}",
                m.dim(),
                config.dim
            )));
        }
    }

    let start = Instant::now();
    let mut specs: Vec<(Suite, u64)> = Vec::new();
    for s in config.suite.expand() {
        let n_trials = if s == Suite::Extremals || fixed.is_some() {
            1
        } else {
            config.trials
        };
        for t in 0..n_trials {
            specs.push((s, t));
        }
    }

    let work = || -> Vec<TrialReport> {
        use rayon::prelude::*;
        specs
            .par_iter()
            .map(|&(s, t)| run_trial(config, s, t, fixed.as_ref()))
            .collect()
    };
    let trials = match thread_cap()? {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut equality_count = 0usize;
    let mut report_count = 0usize;
    let mut failures = Vec::new();
    for tr in &trials {
        for e in &tr.errors {
            failures.push(format!("{} trial {}: {e}", tr.suite, tr.trial));
        }
        for r in &tr.reports {
            report_count += 1;
            min_gap = min_gap.min(r.gap);
            max_gap = max_gap.max(r.gap);
            if r.equality {
                equality_count += 1;
            }
            if is_violation(r, config.eq_tol) {
                failures.push(format!(
                    "{} trial {}: {} violated (gap {:e})",
                    tr.suite, tr.trial, r.name, r.gap
                ));
            }
        }
    }
    if report_count == 0 {
        min_gap = 0.0;
        max_gap = 0.0;
    }

    Ok(SuiteReport {
        config: ConfigEcho {
            suite: config.suite,
            dim: config.dim,
            trials: config.trials,
            seed: config.seed,
            eq_tol: config.eq_tol,
            hyp_tol: config.hyp_tol,
            solver_tol: config.solver_tol,
            measure: config.measure.as_ref().map(|p| p.display().to_string()),
        },
        trials,
        summary: Summary {
            report_count,
            min_gap,
            max_gap,
            equality_count,
            failures,
        },
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("WULFFKIT_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .map(Some)
            .ok_or_else(|| {
                CliError::Config(format!("WULFFKIT_THREADS must be a positive integer, got {v:?}"))
            }),
        Err(_) => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Measure files: {"v":1,"dim":n,"points":[[..]..],"weights":[..],"f":[..]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    v: i64,
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    f: Vec<f64>,
}

pub fn load_measure(path: &Path) -> Result<(DiscreteMeasure, WeightFn), SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: MeasureFile = serde_json::from_str(&text)?;
    if file.v != 1 {
        return Err(SchemaError::Version(file.v));
    }
    if file.dim < 2 {
        return Err(SchemaError::Field("dim"));
    }
    if file.points.is_empty() {
        return Err(SchemaError::Field("points"));
    }
    if file.weights.len() != file.points.len() {
        return Err(SchemaError::Length {
            field: "weights",
            got: file.weights.len(),
            want: file.points.len(),
        });
    }
    if file.f.len() != file.points.len() {
        return Err(SchemaError::Length {
            field: "f",
            got: file.f.len(),
            want: file.points.len(),
        });
    }
    let mut points = Vec::with_capacity(file.points.len());
    for (i, p) in file.points.iter().enumerate() {
        if p.len() != file.dim {
            return Err(SchemaError::PointDim {
                index: i,
                got: p.len(),
                want: file.dim,
            });
        }
        let v = DVector::from_column_slice(p);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(SchemaError::UnitNorm { index: i, norm });
        }
        points.push(v);
    }
    for (i, &w) in file.weights.iter().enumerate() {
        if !(w > 0.0) || !w.is_finite() {
            return Err(SchemaError::NonPositiveWeight { index: i });
        }
    }
    for (i, &fv) in file.f.iter().enumerate() {
        if !(fv > 0.0) || !fv.is_finite() {
            return Err(SchemaError::NonPositiveF { index: i });
        }
    }
    let m = DiscreteMeasure::new(file.dim, points, file.weights)
        .map_err(|e| SchemaError::Measure(e.to_string()))?;
    let f = WeightFn::new(file.f).map_err(|e| SchemaError::Measure(e.to_string()))?;
    Ok((m, f))
}

pub fn save_measure(
    path: &Path,
    m: &DiscreteMeasure,
    f: &WeightFn,
) -> Result<(), CliError> {
    let file = MeasureFile {
        v: 1,
        dim: m.dim(),
        points: m
            .points()
            .iter()
            .map(|p| p.iter().cloned().collect())
            .collect(),
        weights: m.weights().to_vec(),
        f: f.values().to_vec(),
    };
    let text = serde_json::to_string_pretty(&file).expect("measure serialization is infallible");
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

pub fn render(report: &SuiteReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serialization is infallible")
        }
        OutputFormat::Csv => render_csv(report),
    }
}

/// CSV with one row per report; the union of meta keys becomes trailing
/// columns (empty when a report lacks the key).
fn render_csv(report: &SuiteReport) -> String {
    let meta_keys: BTreeSet<&str> = report
        .trials
        .iter()
        .flat_map(|t| t.reports.iter())
        .flat_map(|r| r.meta.keys().map(|k| k.as_str()))
        .collect();
    let mut out = String::new();
    out.push_str("suite,trial,name,lhs,rhs,gap,equality,eq_tol");
    for k in &meta_keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    for t in &report.trials {
        for r in &t.reports {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}",
                t.suite, t.trial, r.name, r.lhs, r.rhs, r.gap, r.equality, r.eq_tol
            ));
            for k in &meta_keys {
                out.push(',');
                if let Some(v) = r.meta.get(*k) {
                    out.push_str(&format!("{v}"));
                }
            }
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Command-line front end
// ---------------------------------------------------------------------------

/// Batch verification of the volume inequalities.
#[derive(Parser, Debug)]
#[command(name = "verify", version, about)]
pub struct Cli {
    /// Suite to run.
    #[arg(value_enum)]
    pub suite: Suite,
    /// Ambient dimension (2..=5).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Number of random trials per suite.
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Base RNG seed; trial streams derive from (seed, trial index).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for equality detection and violation flagging.
    #[arg(long, default_value_t = 1e-7)]
    pub eq_tol: f64,
    /// Tolerance for hypothesis checks (isotropy, centering, normalization).
    #[arg(long, default_value_t = 1e-7)]
    pub hyp_tol: f64,
    /// Target tolerance for the ellipsoid/design solvers.
    #[arg(long, default_value_t = 1e-10)]
    pub solver_tol: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the suites on a fixed measure file instead of generated instances.
    #[arg(long)]
    pub measure: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        RunConfig {
            suite: self.suite,
            dim: self.dim,
            trials: self.trials,
            seed: self.seed,
            eq_tol: self.eq_tol,
            hyp_tol: self.hyp_tol,
            solver_tol: self.solver_tol,
            format: self.format,
            out: self.out,
            measure: self.measure,
        }
    }
}

/// Entry point for the `verify` binary. Exit codes: 0 all bounds hold,
/// 1 verification failure, 2 configuration or schema error.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let config = cli.into_config();
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = render(&report, config.format);
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => {
            use std::io::Write;
            // ignore broken pipes so `verify ... | head` exits quietly
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    if report.has_failures() {
        for f in &report.summary.failures {
            eprintln!("FAIL {f}");
        }
        1
    } else {
        0
    }
}
