use serde::{Deserialize, Serialize};

use super::labels::{Label, Labeling};
use super::thresholds::Thresholds;
use super::BottleneckError;
use crate::engine::Overrides;
use crate::params::VertexId;
use crate::state::{ArrivalDecision, TangleState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    A,
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledArrival {
    pub n: u64,
    pub phase: Phase,
    pub decision: ArrivalDecision,
}

/// Decisions of one phase plus the state reached after the last of them.
#[derive(Clone, Debug)]
pub struct PhaseSchedule {
    pub arrivals: Vec<ScheduledArrival>,
    pub end: TangleState,
}

/// Full forced schedule anchored at arrival `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottleneckPlan {
    pub i: u64,
    pub thresholds: Thresholds,
    /// Free tips kept untouched during phase B.
    pub fb_set: Vec<VertexId>,
    pub labeling: Labeling,
    pub schedule: Vec<ScheduledArrival>,
}

impl BottleneckPlan {
    pub fn c(&self) -> u64 {
        self.labeling.c()
    }

    pub fn overrides(&self) -> Overrides {
        self.schedule
            .iter()
            .map(|a| (a.n, a.decision.clone()))
            .collect()
    }

    pub fn xi(&self, label: Label) -> Result<VertexId, super::LabelError> {
        self.labeling.xi(label)
    }

    pub fn label_of(&self, v: VertexId) -> Result<Label, super::LabelError> {
        self.labeling.label_of(v)
    }

    /// Last forced arrival.
    pub fn end(&self) -> u64 {
        self.i + self.thresholds.kappa_c
    }
}

fn repeated(theta: u32, eps: u32, picks: &[VertexId], count: u32) -> ArrivalDecision {
    let parents: Vec<VertexId> = (0..count as usize).map(|n| picks[n % picks.len()]).collect();
    ArrivalDecision::new(theta, eps, &parents)
}

fn single_count(state: &TangleState) -> u32 {
    state
        .params()
        .k_parents
        .smallest_at_least(1)
        .expect("validated parent count support is non-empty")
}

fn pair_count(state: &TangleState, n: u64) -> Result<u32, BottleneckError> {
    state
        .params()
        .k_parents
        .smallest_at_least(2)
        .ok_or_else(|| BottleneckError::Construction {
            phase: Phase::C,
            step: n,
            label: None,
            case: None,
            reason: "no admissible parent count allows two distinct parents".into(),
        })
}

/// Phase A: arrivals `i .. i + kappa_A` take the largest duration and the
/// smallest lookback and all approve one tip, preferring a pending one.
pub fn plan_step_a(state: &TangleState, th: &Thresholds) -> Result<PhaseSchedule, BottleneckError> {
    let i = state.now() + 1;
    if state.l() as u64 > th.b {
        return Err(BottleneckError::NotAtBottleneck {
            i,
            l: state.l() as u64,
            b: th.b,
        });
    }
    let (hm, e_min) = (state.params().h_max(), state.params().eps_min());
    let count = single_count(state);
    let mut s = state.clone();
    let mut arrivals = Vec::with_capacity(th.kappa_a as usize);
    for n in i..i + th.kappa_a {
        let pool = s.tips_at_lookback(e_min)?;
        let x = pool
            .iter()
            .copied()
            .find(|v| !s.free_tips().contains(v))
            .or_else(|| pool.first().copied())
            .ok_or_else(|| construction(Phase::A, n, "lookback tip set is empty"))?;
        let decision = repeated(hm, e_min, &[x], count);
        s.apply_in_place(&decision)
            .map_err(|e| construction(Phase::A, n, &e.to_string()))?;
        arrivals.push(ScheduledArrival {
            n,
            phase: Phase::A,
            decision,
        });
    }
    Ok(PhaseSchedule { arrivals, end: s })
}

/// Size of the free-tip set protected during phase B.
pub fn fb_size(state: &TangleState) -> usize {
    2 * (state.params().h_max() + state.params().eps_min()) as usize
}

/// Phase B: keep the `2 (h_M + eps_min)` oldest free tips free while the
/// remaining arrivals approve the lowest other tip.
pub fn plan_step_b(
    state: &TangleState,
    th: &Thresholds,
) -> Result<(Vec<VertexId>, PhaseSchedule), BottleneckError> {
    let start = state.now() + 1;
    let p = state.params();
    let (hm, e_min) = (p.h_max(), p.eps_min());
    let need = fb_size(state);
    if state.f() <= 3 * (hm + e_min) as usize {
        return Err(construction(
            Phase::B,
            start,
            &format!(
                "{} free tips after phase A, more than {} needed",
                state.f(),
                3 * (hm + e_min)
            ),
        ));
    }
    let fb: Vec<VertexId> = state.free_tips().iter().copied().take(need).collect();
    let count = single_count(state);
    let mut s = state.clone();
    let mut arrivals = Vec::new();
    for n in start..start + (th.kappa_b - th.kappa_a) {
        let x = s
            .tips_at_lookback(e_min)?
            .iter()
            .copied()
            .find(|v| fb.binary_search(v).is_err())
            .ok_or_else(|| construction(Phase::B, n, "every lookback tip is protected"))?;
        let decision = repeated(hm, e_min, &[x], count);
        s.apply_in_place(&decision)
            .map_err(|e| construction(Phase::B, n, &e.to_string()))?;
        arrivals.push(ScheduledArrival {
            n,
            phase: Phase::B,
            decision,
        });
    }
    Ok((fb, PhaseSchedule { arrivals, end: s }))
}

/// Mesh labeling for the state seen by the first mesh arrival.
pub fn labeling_at(state: &TangleState, i: u64, th: &Thresholds) -> Labeling {
    let mut column_one: Vec<VertexId> = state
        .free_tips()
        .iter()
        .chain(state.inflight().iter())
        .copied()
        .collect();
    column_one.sort_unstable();
    Labeling {
        i,
        start: state.now() + 1,
        last: i + th.kappa_c,
        column_one,
    }
}

/// Which feasibility argument covers the mesh vertex `label`.
pub fn feasibility_case(label: Label, fb_len: u64, c: u64) -> u8 {
    match (label.j, label.k) {
        (2, k) if k <= fb_len => 1,
        (2, _) => 2,
        (_, 1) => 3,
        (_, k) if k < c => 4,
        _ => 5,
    }
}

/// Phase C: arrivals `i + kappa_B ..= i + kappa_C` approve their two
/// neighbours in the previous column.
pub fn plan_step_c(
    state: &TangleState,
    i: u64,
    fb_len: usize,
    th: &Thresholds,
) -> Result<(Labeling, PhaseSchedule), BottleneckError> {
    let p = state.params();
    let (hm, e_min) = (p.h_max(), p.eps_min());
    let labeling = labeling_at(state, i, th);
    let c = labeling.c();
    if c <= fb_len as u64 {
        return Err(construction(
            Phase::C,
            labeling.start,
            &format!("mesh height {c} does not exceed {fb_len}"),
        ));
    }
    let count = pair_count(state, labeling.start)?;
    let mut s = state.clone();
    let mut arrivals = Vec::new();
    for n in labeling.start..=labeling.last {
        let label = labeling.label_of(n)?;
        let (lx, ly) = labeling.interchange_parents(label);
        let (x, y) = (labeling.xi(lx)?, labeling.xi(ly)?);
        let decision = repeated(hm, e_min, &[x, y], count);
        s.apply_in_place(&decision)
            .map_err(|e| BottleneckError::Construction {
                phase: Phase::C,
                step: n,
                label: Some(label),
                case: Some(feasibility_case(label, fb_len as u64, c)),
                reason: e.to_string(),
            })?;
        arrivals.push(ScheduledArrival {
            n,
            phase: Phase::C,
            decision,
        });
    }
    Ok((labeling, PhaseSchedule { arrivals, end: s }))
}

/// All three phases from the state seen by arrival `i`.
pub fn plan_bottleneck(state: &TangleState, th: &Thresholds) -> Result<BottleneckPlan, BottleneckError> {
    let i = state.now() + 1;
    let a = plan_step_a(state, th)?;
    let (fb_set, b) = plan_step_b(&a.end, th)?;
    let (labeling, c) = plan_step_c(&b.end, i, fb_set.len(), th)?;
    let mut schedule = a.arrivals;
    schedule.extend(b.arrivals);
    schedule.extend(c.arrivals);
    Ok(BottleneckPlan {
        i,
        thresholds: th.clone(),
        fb_set,
        labeling,
        schedule,
    })
}

fn construction(phase: Phase, step: u64, reason: &str) -> BottleneckError {
    BottleneckError::Construction {
        phase,
        step,
        label: None,
        case: None,
        reason: reason.to_string(),
    }
}
