//! Experiment configuration and the workflows behind each subcommand.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    bookkeeping_residual_max, completion_window, confirmed_with, d_star, martingale_check,
    stabilization_radius, tip_recurrence, History, MartingaleMonitor, StabilizationReport,
    TipRecurrence,
};
use crate::bottleneck::{
    plan_bottleneck, thresholds, verify_bottleneck, BottleneckError, BottleneckPlan,
    BottleneckReport, VerifyError,
};
use crate::engine::{run, Engine, EngineError, Overrides, Trace};
use crate::io::{self, IoError};
use crate::params::{ConfigError, ModelParams, ParentCount, VertexId};
use crate::state::Validation;

pub const THREADS_ENV: &str = "TANGLEPROOF_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("no bottleneck anchor found: {0}")]
    NoAnchor(String),
    #[error("construction failure: {0}")]
    Construction(String),
}

impl ExperimentError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 1,
            ExperimentError::Io(_) => 2,
            ExperimentError::NoAnchor(_) => 3,
            ExperimentError::Construction(_) => 4,
        }
    }
}

impl From<ConfigError> for ExperimentError {
    fn from(e: ConfigError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

impl From<EngineError> for ExperimentError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Config(_) | EngineError::NoSteps => ExperimentError::Config(e.to_string()),
            other => ExperimentError::Construction(other.to_string()),
        }
    }
}

impl From<BottleneckError> for ExperimentError {
    fn from(e: BottleneckError) -> Self {
        match e {
            BottleneckError::NotAtBottleneck { .. } => ExperimentError::NoAnchor(e.to_string()),
            BottleneckError::Config(c) => c.into(),
            other => ExperimentError::Construction(other.to_string()),
        }
    }
}

impl From<VerifyError> for ExperimentError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Config(c) => c.into(),
            VerifyError::NotAnchor { .. } => ExperimentError::NoAnchor(e.to_string()),
            other => ExperimentError::Config(other.to_string()),
        }
    }
}

/// Flat configuration document; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub h: Vec<u32>,
    pub p_theta: Vec<f64>,
    pub eps_support: Vec<u32>,
    pub p_eps: Vec<f64>,
    pub k_parents: ParentCount,
    pub b: u64,
    pub seeds: Vec<u64>,
    /// Arrivals per run; for `force`, the window searched for an anchor.
    pub steps: u64,
    pub threads: Option<usize>,
    /// Fixed anchor arrival; `None` takes the first arrival that sees at
    /// most `b` tips after `search_from`.
    pub anchor: Option<u64>,
    pub search_from: u64,
    /// Number of forced bottlenecks, each more than `2 kappa_C` after the last.
    pub bottlenecks: u32,
    /// Free arrivals simulated after the last forced one.
    pub post_steps: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = ModelParams::reference();
        ExperimentConfig {
            h: p.h,
            p_theta: p.p_theta,
            eps_support: p.eps_support,
            p_eps: p.p_eps,
            k_parents: p.k_parents,
            b: p.b,
            seeds: vec![1],
            steps: 100_000,
            threads: None,
            anchor: None,
            search_from: 0,
            bottlenecks: 1,
            post_steps: 500,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        io::read_json(path).map_err(|e| match e {
            IoError::Schema { .. } => ExperimentError::Config(e.to_string()),
            other => ExperimentError::Io(other),
        })
    }

    pub fn params(&self) -> Result<ModelParams, ExperimentError> {
        let p = ModelParams {
            h: self.h.clone(),
            p_theta: self.p_theta.clone(),
            eps_support: self.eps_support.clone(),
            p_eps: self.p_eps.clone(),
            k_parents: self.k_parents.clone(),
            b: self.b,
        };
        p.validate()?;
        Ok(p)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, ExperimentError> {
        let from_env = std::env::var(THREADS_ENV)
            .ok()
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| ExperimentError::Config(format!("{THREADS_ENV} must be a number")))
            })
            .transpose()?;
        let n = match (from_env, self.threads) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => a.or(b).unwrap_or(0),
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: u32,
    pub max: u32,
    pub mean: f64,
}

impl Stats {
    fn of(values: impl Iterator<Item = u32>) -> Stats {
        let (mut min, mut max, mut sum, mut n) = (u32::MAX, 0, 0u64, 0u64);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v as u64;
            n += 1;
        }
        Stats {
            min: if n == 0 { 0 } else { min },
            max,
            mean: if n == 0 { 0.0 } else { sum as f64 / n as f64 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitStats {
    pub b: u64,
    pub count: u64,
    pub first: Option<u64>,
    pub spaced: u64,
    pub completed_excursions: u64,
    pub max_excursion: u64,
}

impl HitStats {
    fn of(rec: &TipRecurrence) -> Self {
        HitStats {
            b: rec.b,
            count: rec.hit_count,
            first: rec.hits.first().copied(),
            spaced: rec.spaced_hits.len() as u64,
            completed_excursions: rec.completed_excursions,
            max_excursion: rec.max_excursion,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub steps: u64,
    pub l: Stats,
    pub f: Stats,
    pub w: Stats,
    pub hits: HitStats,
    /// Largest deviation of the free-tip update from completions minus delta.
    pub eq6_residual_max: u64,
    pub max_solid_in_degree: u32,
}

pub fn summarize(trace: &Trace) -> Result<RunSummary, ExperimentError> {
    let rec = tip_recurrence(trace, trace.params.b).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let fin = &trace.final_state;
    let max_solid_in_degree = fin
        .solid_vertices()
        .map(|v| fin.degrees(v).map(|d| d.0).unwrap_or(0))
        .max()
        .unwrap_or(0);
    Ok(RunSummary {
        seed: trace.seed,
        steps: trace.len(),
        l: Stats::of(trace.steps.iter().map(|s| s.l)),
        f: Stats::of(trace.steps.iter().map(|s| s.f)),
        w: Stats::of(trace.steps.iter().map(|s| s.w)),
        hits: HitStats::of(&rec),
        eq6_residual_max: bookkeeping_residual_max(trace),
        max_solid_in_degree,
    })
}

/// Directory holding the outputs of one seed.
pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

fn create_dir(path: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(path).map_err(|source| {
        ExperimentError::Io(IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

/// Independent runs, one per seed, in parallel. Writes
/// `<out>/seed-<s>/{trace.csv,trace.json,summary.json}` when `write` is set.
pub fn run_replicas(cfg: &ExperimentConfig, write: bool) -> Result<Vec<RunSummary>, ExperimentError> {
    let params = cfg.params()?;
    if cfg.steps == 0 {
        return Err(ExperimentError::Config("the number of steps must be at least 1".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(ExperimentError::Config("at least one seed is required".into()));
    }
    let pool = cfg.pool()?;
    pool.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let trace = run(&params, seed, cfg.steps, &Overrides::new())?;
                let summary = summarize(&trace)?;
                if write {
                    let dir = seed_dir(&cfg.out, seed);
                    create_dir(&dir)?;
                    io::write_trace(&trace, &dir.join("trace.csv"))?;
                    io::write_json(&dir.join("summary.json"), &summary)?;
                }
                Ok(summary)
            })
            .collect()
    })
}

/// Whether every vertex solid before the anchor is confirmed at `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfirmationCheck {
    pub t: u64,
    pub anchor_vertices: u64,
    pub confirmed: u64,
    pub missing: Vec<VertexId>,
}

impl ConfirmationCheck {
    pub fn holds(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Checks the vertices of `S_{i-1}` against the confirmed set at state `t`.
pub fn confirmation_check(history: &History, i: u64, t: u64) -> Result<ConfirmationCheck, ExperimentError> {
    let eventual = history.eventual();
    let confirmed = confirmed_with(history, &eventual, t)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let anchor: Vec<VertexId> = history.solid_at(i - 1).collect();
    let missing: Vec<VertexId> = anchor
        .iter()
        .copied()
        .filter(|v| !confirmed.contains(v))
        .collect();
    Ok(ConfirmationCheck {
        t,
        anchor_vertices: anchor.len() as u64,
        confirmed: confirmed.len() as u64,
        missing,
    })
}

/// State at which every vertex solid before anchor `i` should be confirmed.
pub fn confirmation_time(plan: &BottleneckPlan, params: &ModelParams) -> u64 {
    plan.end() + params.eps_max() as u64 + params.h_max() as u64 - 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottleneckSummary {
    pub i: u64,
    pub all_hold: bool,
    pub confirmation: ConfirmationCheck,
    pub stabilization: StabilizationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceSummary {
    pub seed: u64,
    pub steps: u64,
    pub bottlenecks: Vec<BottleneckSummary>,
    /// Ball radii of consecutive bottlenecks grow strictly.
    pub radii_increase: bool,
}

pub struct ForceOutcome {
    pub trace: Trace,
    pub plans: Vec<BottleneckPlan>,
    pub reports: Vec<BottleneckReport>,
    pub summary: ForceSummary,
}

/// Simulates from the first seed, forces `cfg.bottlenecks` schedules at
/// admissible anchors, continues for `cfg.post_steps` free arrivals and
/// checks every bottleneck.
pub fn force(cfg: &ExperimentConfig) -> Result<ForceOutcome, ExperimentError> {
    let params = cfg.params()?;
    let th = thresholds(&params)?;
    let seed = *cfg
        .seeds
        .first()
        .ok_or_else(|| ExperimentError::Config("at least one seed is required".into()))?;
    if cfg.bottlenecks == 0 {
        return Err(ExperimentError::Config("bottlenecks must be at least 1".into()));
    }
    let mut engine = Engine::new(params.clone(), seed)?;
    let mut plans: Vec<BottleneckPlan> = Vec::new();
    for k in 0..cfg.bottlenecks {
        let earliest = match plans.last() {
            None => cfg.anchor.unwrap_or(cfg.search_from + 1).max(1),
            Some(prev) => prev.i + 2 * th.kappa_c + 1,
        };
        let deadline = earliest + cfg.steps;
        loop {
            let i = engine.state().now() + 1;
            let fixed = k == 0 && cfg.anchor.is_some();
            if i >= earliest && (fixed || engine.state().l() as u64 <= th.b) {
                break;
            }
            if i >= deadline {
                return Err(ExperimentError::NoAnchor(format!(
                    "no arrival in {earliest}..{deadline} sees at most {} tips",
                    th.b
                )));
            }
            engine.step(None)?;
        }
        let plan = plan_bottleneck(engine.state(), &th)?;
        for a in &plan.schedule {
            engine.step(Some(&a.decision))?;
        }
        log::info!("forced bottleneck at arrival {} with mesh height {}", plan.i, plan.c());
        plans.push(plan);
    }
    for _ in 0..cfg.post_steps.max(params.eps_max() as u64 + params.h_max() as u64) {
        engine.step(None)?;
    }
    let trace = engine.into_trace();
    let history = History::from_trace(&trace);
    let mut reports = Vec::new();
    let mut summaries: Vec<BottleneckSummary> = Vec::new();
    for plan in &plans {
        let report = verify_bottleneck(&trace, plan)?;
        let confirmation = confirmation_check(&history, plan.i, confirmation_time(plan, &params))?;
        let stabilization = stabilization_radius(&history, plan.i, plan.end())
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        summaries.push(BottleneckSummary {
            i: plan.i,
            all_hold: report.all_hold(),
            confirmation,
            stabilization,
        });
        reports.push(report);
    }
    let radii_increase = summaries
        .windows(2)
        .all(|w| w[1].stabilization.radius > w[0].stabilization.radius);
    let summary = ForceSummary {
        seed,
        steps: trace.len(),
        bottlenecks: summaries,
        radii_increase,
    };
    Ok(ForceOutcome {
        trace,
        plans,
        reports,
        summary,
    })
}

/// Writes `trace.csv`, `trace.json`, `plan-<k>.json`, `report-<k>.json`
/// and `summary.json` under `out`.
pub fn write_force(out: &Path, outcome: &ForceOutcome) -> Result<(), ExperimentError> {
    create_dir(out)?;
    io::write_trace(&outcome.trace, &out.join("trace.csv"))?;
    for (k, (plan, report)) in outcome.plans.iter().zip(&outcome.reports).enumerate() {
        io::write_json(&out.join(format!("plan-{}.json", k + 1)), plan)?;
        io::write_json(&out.join(format!("report-{}.json", k + 1)), report)?;
    }
    io::write_json(&out.join("summary.json"), &outcome.summary)?;
    Ok(())
}

fn load_trace(path: &Path) -> Result<Trace, ExperimentError> {
    let file = io::read_trace(path)?;
    file.rebuild().map_err(|e| {
        ExperimentError::Io(IoError::Schema {
            path: path.to_path_buf(),
            location: "decisions".into(),
            message: e.to_string(),
        })
    })
}

pub fn verify_files(trace: &Path, plan: &Path) -> Result<BottleneckReport, ExperimentError> {
    let trace = load_trace(trace)?;
    let plan: BottleneckPlan = io::read_json(plan)?;
    Ok(verify_bottleneck(&trace, &plan)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub windows: u64,
    pub len: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfirmationPoint {
    pub t: u64,
    pub solid: u64,
    pub confirmed: u64,
    /// Share of solid non-genesis vertices that are confirmed.
    pub non_root_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub from: u64,
    pub to: u64,
    pub agree_radius: Option<u64>,
    pub d_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub steps: u64,
    /// Largest deviation of the free-tip update from completions minus delta.
    pub eq6_residual_max: u64,
    pub completion_windows: WindowSummary,
    pub martingale: Vec<MartingaleMonitor>,
    pub recurrence: TipRecurrence,
    pub confirmation: Vec<ConfirmationPoint>,
    pub metric: Vec<MetricPoint>,
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    /// Number of evenly spaced checkpoints.
    pub points: u64,
    pub window: u64,
    pub b: Option<u64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            points: 10,
            window: 1000,
            b: None,
        }
    }
}

pub fn analyze(trace: &Trace, opts: &AnalyzeOptions) -> Result<AnalysisSummary, ExperimentError> {
    let cfg_err = |e: crate::analysis::AnalysisError| ExperimentError::Config(e.to_string());
    let len = trace.len();
    let points = opts.points.max(1);
    let grid: Vec<u64> = (1..=points).map(|k| k * len / (points + 1)).filter(|&t| t > 0).collect();
    let hm = trace.params.h_max() as u64;

    let mut windows = WindowSummary {
        windows: 0,
        len: opts.window,
        violations: 0,
    };
    let mut alpha = opts.window;
    while alpha + opts.window <= len {
        windows.windows += 1;
        if !completion_window(trace, alpha, opts.window).map_err(cfg_err)?.holds() {
            windows.violations += 1;
        }
        alpha += opts.window;
    }

    let martingale = grid
        .iter()
        .filter(|&&a| a >= hm && a < len)
        .map(|&a| martingale_check(trace, a).map_err(cfg_err))
        .collect::<Result<Vec<_>, _>>()?;
    let recurrence = tip_recurrence(trace, opts.b.unwrap_or(trace.params.b)).map_err(cfg_err)?;

    let history = History::from_trace(trace);
    let eventual = history.eventual();
    let confirmation = grid
        .iter()
        .map(|&t| {
            let set = confirmed_with(&history, &eventual, t).map_err(cfg_err)?;
            let solid = history.solid_at(t).count() as u64;
            let non_root = set.iter().filter(|&&v| v != 0).count() as f64;
            Ok(ConfirmationPoint {
                t,
                solid,
                confirmed: set.len() as u64,
                non_root_fraction: if solid > 1 { non_root / (solid - 1) as f64 } else { 0.0 },
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let metric = grid
        .windows(2)
        .map(|w| {
            let d = d_star(&history.snapshot(w[0]), &history.snapshot(w[1]));
            MetricPoint {
                from: w[0],
                to: w[1],
                agree_radius: d.agree_radius,
                d_star: d.value(),
            }
        })
        .collect();
    Ok(AnalysisSummary {
        steps: len,
        eq6_residual_max: bookkeeping_residual_max(trace),
        completion_windows: windows,
        martingale,
        recurrence,
        confirmation,
        metric,
    })
}

pub fn analyze_file(path: &Path, opts: &AnalyzeOptions) -> Result<AnalysisSummary, ExperimentError> {
    analyze(&load_trace(path)?, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub steps: u64,
    /// Re-executing the recorded decisions reproduces every recorded row.
    pub identical: bool,
    /// Running the seed again, with the recorded forced decisions,
    /// reproduces the recorded decisions; `None` for hand-built traces.
    pub regenerated: Option<bool>,
    pub differences: Vec<String>,
}

const MAX_DIFFS: usize = 20;

pub fn replay_file(path: &Path) -> Result<(ReplayOutcome, Trace), ExperimentError> {
    let file = io::read_trace(path)?;
    let rebuilt = file.rebuild().map_err(|e| {
        ExperimentError::Io(IoError::Schema {
            path: path.to_path_buf(),
            location: "decisions".into(),
            message: e.to_string(),
        })
    })?;
    let mut differences: Vec<String> = file
        .rows
        .iter()
        .zip(&rebuilt.steps)
        .filter(|(a, b)| a != b)
        .map(|(a, b)| format!("step {}: recorded {:?}, recomputed {:?}", a.n, a, b))
        .take(MAX_DIFFS)
        .collect();
    let identical = differences.is_empty();
    let regenerated = if file.meta.validation == Validation::Strict && !file.meta.synthetic {
        let forced: BTreeSet<u64> = file.meta.forced_steps().into_iter().collect();
        let overrides: Overrides = file
            .rows
            .iter()
            .filter(|r| forced.contains(&r.n))
            .map(|r| (r.n, r.decision.clone()))
            .collect();
        match run(&file.meta.params, file.meta.seed, file.meta.steps, &overrides) {
            Ok(fresh) => {
                let before = differences.len();
                differences.extend(
                    fresh
                        .steps
                        .iter()
                        .zip(&file.rows)
                        .filter(|(a, b)| a.decision != b.decision)
                        .map(|(a, _)| format!("step {}: seed {} draws a different decision", a.n, file.meta.seed))
                        .take(MAX_DIFFS),
                );
                Some(differences.len() == before)
            }
            Err(e) => {
                differences.push(format!("regeneration failed: {e}"));
                Some(false)
            }
        }
    } else {
        None
    };
    Ok((
        ReplayOutcome {
            steps: file.meta.steps,
            identical,
            regenerated,
            differences,
        },
        rebuilt,
    ))
}
