use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::labels::Label;
use super::plan::{BottleneckPlan, Phase};
use super::thresholds::thresholds;
use crate::analysis::{sweep, History, Marks};
use crate::engine::Trace;
use crate::params::{ConfigError, VertexId};
use crate::state::ArrivalDecision;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("trace ends at {have} but the checks need states up to {need}")]
    TooShort { need: u64, have: u64 },
    #[error("arrival {i} sees {l} tips, more than b = {b}")]
    NotAnchor { i: u64, l: u64, b: u64 },
    #[error("plan does not match trace: {0}")]
    PlanMismatch(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Outcome of one finite-instance check.
///
/// `holds` requires both that the trace realized the planned schedule and
/// that the conclusion was observed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub holds: bool,
    pub conclusion: bool,
    pub checked: u64,
    pub witness: Option<String>,
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn new(schedule_ok: bool, checked: u64, failure: Option<String>, witness: String) -> Self {
        let conclusion = failure.is_none();
        CheckResult {
            holds: schedule_ok && conclusion,
            conclusion,
            checked,
            witness: conclusion.then_some(witness),
            counterexample: failure,
        }
    }
}

/// A step whose recorded decision differs from the plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub n: u64,
    pub phase: Phase,
    pub label: Option<Label>,
    pub expected: ArrivalDecision,
    pub found: ArrivalDecision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottleneckReport {
    pub i: u64,
    pub c_i: u64,
    pub c_i_upper: u64,
    pub kappa_a: u64,
    pub kappa_b: u64,
    pub kappa_c: u64,
    pub rho: String,
    pub rho_log10: f64,
    pub horizon: u64,
    pub deviations: Vec<Deviation>,
    /// Free tips when phase A ends, which must exceed `3 (h_M + eps_min)`.
    pub free_after_a: u64,
    pub free_tip_growth: CheckResult,
    pub fenced_tips_stay_free: CheckResult,
    pub mesh_inflight: u64,
    /// Every solid non-free vertex before the mesh is reached from column one.
    pub temp2: CheckResult,
    /// Every vertex after the mesh reaches the last column and all of column one.
    pub temp3: CheckResult,
    /// Every vertex after the mesh reaches every vertex present before it.
    pub temp4: CheckResult,
    /// Tips of the anchor state stop being tips before the mesh ends.
    pub cauchy1: CheckResult,
}

impl BottleneckReport {
    /// The four reachability claims all hold.
    pub fn all_hold(&self) -> bool {
        [&self.temp2, &self.temp3, &self.temp4, &self.cauchy1]
            .iter()
            .all(|c| c.holds)
    }
}

/// Checks a forced trace against its plan on the finite horizon of the trace.
pub fn verify_bottleneck(trace: &Trace, plan: &BottleneckPlan) -> Result<BottleneckReport, VerifyError> {
    let params = &trace.params;
    let th = thresholds(params)?;
    if th != plan.thresholds {
        return Err(VerifyError::PlanMismatch(
            "thresholds differ from those of the trace parameters".into(),
        ));
    }
    let (hm, e_max) = (params.h_max() as u64, params.eps_max() as u64);
    let i = plan.i;
    let horizon = trace.len();
    let need = i + th.kappa_c + e_max + hm;
    if i == 0 || horizon < need {
        return Err(VerifyError::TooShort { need, have: horizon });
    }
    let anchor_l = trace.counts(i - 1).0 as u64;
    if anchor_l > th.b {
        return Err(VerifyError::NotAnchor { i, l: anchor_l, b: th.b });
    }

    let hist = History::from_trace(trace);
    let after_a = i + th.kappa_a - 1;
    let mesh_seen = i + th.kappa_b - 1;

    let free_a = hist.free_at(after_a);
    let fb: Vec<VertexId> = free_a.iter().copied().take(plan.fb_set.len()).collect();
    if fb != plan.fb_set {
        return Err(VerifyError::PlanMismatch(format!(
            "fenced tips {:?} in the plan, {:?} in the trace",
            plan.fb_set, fb
        )));
    }
    let free_mesh = hist.free_at(mesh_seen);
    let inflight_mesh = hist.inflight_at(mesh_seen);
    let mut column_one: Vec<VertexId> = free_mesh.iter().chain(&inflight_mesh).copied().collect();
    column_one.sort_unstable();
    if column_one != plan.labeling.column_one {
        return Err(VerifyError::PlanMismatch("first mesh column differs".into()));
    }

    let deviations: Vec<Deviation> = plan
        .schedule
        .iter()
        .filter_map(|a| {
            let found = &trace.steps.get(a.n as usize - 1)?.decision;
            (found != &a.decision).then(|| Deviation {
                n: a.n,
                phase: a.phase,
                label: plan.label_of(a.n).ok().filter(|_| a.phase == Phase::C),
                expected: a.decision.clone(),
                found: found.clone(),
            })
        })
        .collect();
    let ok = deviations.is_empty();

    let free_tip_growth = check_growth(trace, i, hm, th.kappa_a, ok);
    let fenced = check_fenced(&hist, &plan.fb_set, after_a, mesh_seen, ok);

    let eventual = hist.eventual();
    let mut marks = Marks::new(eventual.id_bound());
    let labeling = &plan.labeling;
    let c = labeling.c();
    let post: Vec<VertexId> = (i + th.kappa_c + 1..=horizon).collect();

    // every solid non-free vertex hangs below column one once it is solid
    let temp2 = {
        let solid = hist.snapshot(mesh_seen + hm + 1);
        let mut m = Marks::new(solid.id_bound());
        sweep(&solid, &labeling.column_one, true, &mut m);
        let free: BTreeSet<VertexId> = free_mesh.iter().copied().collect();
        let targets: Vec<VertexId> = hist.solid_at(mesh_seen).filter(|v| !free.contains(v)).collect();
        let miss = targets.iter().find(|&&v| !m.is_marked(v));
        CheckResult::new(
            ok,
            targets.len() as u64,
            miss.map(|v| format!("vertex {v} is not reached from the first mesh column")),
            format!("{} vertices reached from {} column-one vertices", targets.len(), c),
        )
    };

    let temp3 = {
        let tail: Vec<VertexId> = (1..=c)
            .map(|k| labeling.xi(Label::new(i, 2 * c, k)))
            .collect::<Result<_, _>>()
            .map_err(|e| VerifyError::PlanMismatch(e.to_string()))?;
        let mut failure = None;
        sweep(&eventual, &tail, false, &mut marks);
        if let Some(v) = post.iter().find(|&&v| !marks.is_marked(v)) {
            failure = Some(format!("vertex {v} reaches no vertex of column {}", 2 * c));
        }
        for m in 1..=c {
            if failure.is_some() {
                break;
            }
            let src = labeling.column_one[m as usize - 1];
            sweep(&eventual, &[src], false, &mut marks);
            if let Some(v) = post.iter().find(|&&v| !marks.is_marked(v)) {
                failure = Some(format!("vertex {v} does not reach {} = {}", Label::new(i, 1, m), src));
            }
        }
        if failure.is_none() {
            // old vertices are no longer tips once the mesh has closed
            let from = i + th.kappa_c - e_max - 1;
            let old = (0..tail[0]).find(|&v| {
                let (a, b) = hist.tip_interval(v);
                a <= horizon && b > from
            });
            failure = old.map(|v| format!("vertex {v} is still a tip at or after state {from}"));
        }
        CheckResult::new(
            ok,
            post.len() as u64,
            failure,
            format!(
                "{} later arrivals reach column {} and all {} column-one vertices",
                post.len(),
                2 * c,
                c
            ),
        )
    };

    let temp4 = {
        let before: Vec<VertexId> = hist.solid_at(mesh_seen).collect();
        let mut covers = vec![false; eventual.id_bound()];
        let mut failure = None;
        for &v in &post {
            // reaching a vertex that reaches everything is enough
            if eventual.parents(v).iter().any(|&p| covers[p as usize]) {
                covers[v as usize] = true;
                continue;
            }
            sweep(&eventual, &[v], true, &mut marks);
            if let Some(u) = before.iter().find(|&&u| !marks.is_marked(u)) {
                failure = Some(format!("vertex {v} does not reach {u}"));
                break;
            }
            covers[v as usize] = true;
        }
        CheckResult::new(
            ok,
            (post.len() * before.len()) as u64,
            failure,
            format!(
                "{} later arrivals reach all {} vertices solid before the mesh",
                post.len(),
                before.len()
            ),
        )
    };

    let cauchy1 = {
        let limit = i + th.kappa_c - e_max - hm - 1;
        let anchor_tips = hist.tips_at(i - 1);
        let stuck = anchor_tips.iter().find(|&&v| hist.tip_interval(v).1 > limit);
        CheckResult::new(
            ok,
            anchor_tips.len() as u64,
            stuck.map(|v| format!("anchor tip {v} is still a tip at state {limit}")),
            format!("{} anchor tips retired by state {limit}", anchor_tips.len()),
        )
    };

    Ok(BottleneckReport {
        i,
        c_i: c,
        c_i_upper: th.b + params.m() * th.kappa_b + hm,
        kappa_a: th.kappa_a,
        kappa_b: th.kappa_b,
        kappa_c: th.kappa_c,
        rho: th.rho.to_string(),
        rho_log10: th.rho.log10(),
        horizon,
        deviations,
        free_after_a: free_a.len() as u64,
        free_tip_growth,
        fenced_tips_stay_free: fenced,
        mesh_inflight: inflight_mesh.len() as u64,
        temp2,
        temp3,
        temp4,
        cauchy1,
    })
}

/// During phase A the free-tip count moves by 0 or 1, and a stall is
/// followed by `h_M - 1` increments.
fn check_growth(trace: &Trace, i: u64, hm: u64, kappa_a: u64, ok: bool) -> CheckResult {
    let inc = |n: u64| trace.counts(n).1 as i64 - trace.counts(n - 1).1 as i64;
    let p = &trace.params;
    let floor = 3 * (p.h_max() + p.eps_min()) as u64;
    let mut failure = None;
    for n in i + hm + 2..i + kappa_a {
        let d = inc(n);
        if !(0..=1).contains(&d) {
            failure = Some(format!("free-tip increment {d} at step {n}"));
            break;
        }
        if d == 0 && n + hm < i + kappa_a {
            if let Some(k) = (n + 1..n + hm).find(|&k| inc(k) != 1) {
                failure = Some(format!("stall at step {n} not followed by growth at {k}"));
                break;
            }
        }
    }
    let f = trace.counts(i + kappa_a - 1).1 as u64;
    if failure.is_none() && f <= floor {
        failure = Some(format!("{f} free tips after phase A, need more than {floor}"));
    }
    CheckResult::new(
        ok,
        kappa_a,
        failure,
        format!("{f} free tips after phase A"),
    )
}

fn check_fenced(hist: &History, fb: &[VertexId], from: u64, to: u64, ok: bool) -> CheckResult {
    let bad = (from..=to).find_map(|s| fb.iter().find(|&&v| !hist.is_free(v, s)).map(|&v| (v, s)));
    CheckResult::new(
        ok,
        fb.len() as u64,
        bad.map(|(v, s)| format!("fenced tip {v} is not free at state {s}")),
        format!("{} fenced tips free through phase B", fb.len()),
    )
}
