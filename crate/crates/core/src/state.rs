//! Snapshot of the tangle and the deterministic one-step transition.
//!
//! State `S_n` is the graph right after arrival `n` has been attached; `S_0`
//! holds only the genesis. Arrival `n` observes `S_{n-1}` and draws its
//! parents from the tip set of `S_{n-1-eps}`. A vertex with proof-of-work
//! duration `theta` arriving at `n` becomes solid in `S_{n+theta}`.
//!
//! Snapshots share structure through persistent vectors, so keeping many of
//! them alive (or cloning before a tentative step) is cheap.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::params::{ModelParams, VertexId};

pub type Parents = SmallVec<[VertexId; 3]>;

/// What an arrival does: its proof-of-work duration, its lookback and the
/// parents it approves (possibly with repeats).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalDecision {
    pub theta: u32,
    pub eps: u32,
    pub parents: Parents,
}

impl ArrivalDecision {
    pub fn new(theta: u32, eps: u32, parents: &[VertexId]) -> Self {
        ArrivalDecision {
            theta,
            eps,
            parents: parents.iter().copied().collect(),
        }
    }

    /// Parents with repeats removed, ascending.
    pub fn distinct_parents(&self) -> Parents {
        let mut p = self.parents.clone();
        p.sort_unstable();
        p.dedup();
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub theta: u32,
    pub eps: u32,
    /// Distinct parents, ascending.
    pub parents: Parents,
    pub completion_time: u64,
}

/// How strictly [`TangleState::apply_step`] checks a decision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    /// Every parent must be a tip of the lookback snapshot.
    #[default]
    Strict,
    /// Parents only need to be older and to finish their proof of work
    /// before the child does. Used for hand-drawn graphs that no timing of
    /// the process can produce.
    Structural,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("arrival {step}: parent {parent} is not a tip {depth} steps back")]
    ProtocolViolation {
        step: u64,
        parent: VertexId,
        depth: u32,
    },
    #[error("arrival {step}: parent {parent} does not finish before its child")]
    ParentOutOfOrder { step: u64, parent: VertexId },
    #[error("arrival {step}: {what}")]
    InvalidDecision { step: u64, what: String },
    #[error("lookback depth {depth} exceeds the retained history of {max}")]
    OutOfHistory { depth: u32, max: u32 },
    #[error("vertex {0} is not a solid vertex of this state")]
    UnknownVertex(VertexId),
}

/// Per-step bookkeeping returned by [`TangleState::apply_step`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    /// Free tips of the previous state newly approved by the arrival.
    pub delta: u32,
    /// Vertices whose proof of work finished at this step.
    pub completions: u32,
}

#[derive(Clone, Debug)]
pub struct TangleState {
    params: Arc<ModelParams>,
    now: u64,
    records: im::Vector<VertexRecord>,
    solid_in_degree: im::Vector<u32>,
    inflight: BTreeSet<VertexId>,
    tips: BTreeSet<VertexId>,
    free: BTreeSet<VertexId>,
    pending: BTreeSet<VertexId>,
    /// `history[d]` is the tip set `d` steps ago, for `d <= eps_max`.
    history: VecDeque<Arc<[VertexId]>>,
    last_completions: u32,
    validation: Validation,
}

impl TangleState {
    /// The state holding only the genesis, which is a free tip.
    pub fn genesis(params: Arc<ModelParams>) -> Self {
        Self::genesis_with(params, Validation::Strict)
    }

    pub fn genesis_with(params: Arc<ModelParams>, validation: Validation) -> Self {
        let depth = params.eps_max() as usize + 1;
        let root: Arc<[VertexId]> = Arc::from(vec![0]);
        TangleState {
            now: 0,
            records: im::vector![VertexRecord {
                id: 0,
                theta: 0,
                eps: 0,
                parents: Parents::new(),
                completion_time: 0,
            }],
            solid_in_degree: im::vector![0],
            inflight: BTreeSet::new(),
            tips: BTreeSet::from([0]),
            free: BTreeSet::from([0]),
            pending: BTreeSet::new(),
            history: std::iter::repeat_n(root, depth).collect(),
            last_completions: 0,
            validation,
            params,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn params_arc(&self) -> &Arc<ModelParams> {
        &self.params
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    /// Index of the last attached arrival.
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn tips(&self) -> &BTreeSet<VertexId> {
        &self.tips
    }

    pub fn free_tips(&self) -> &BTreeSet<VertexId> {
        &self.free
    }

    pub fn pending_tips(&self) -> &BTreeSet<VertexId> {
        &self.pending
    }

    pub fn inflight(&self) -> &BTreeSet<VertexId> {
        &self.inflight
    }

    pub fn l(&self) -> usize {
        self.tips.len()
    }

    pub fn f(&self) -> usize {
        self.free.len()
    }

    pub fn w(&self) -> usize {
        self.pending.len()
    }

    /// Number of vertices finishing their proof of work at the last step.
    pub fn completions_at(&self) -> u32 {
        self.last_completions
    }

    pub fn record(&self, v: VertexId) -> Option<&VertexRecord> {
        self.records.get(usize::try_from(v).ok()?)
    }

    pub fn records(&self) -> impl Iterator<Item = &VertexRecord> {
        self.records.iter()
    }

    pub fn is_solid(&self, v: VertexId) -> bool {
        v <= self.now && !self.inflight.contains(&v)
    }

    pub fn solid_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..=self.now).filter(|v| !self.inflight.contains(v))
    }

    /// Approval edges `(child, parent)` of solid vertices.
    pub fn solid_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.records
            .iter()
            .filter(|r| !self.inflight.contains(&r.id))
            .flat_map(|r| r.parents.iter().map(move |&p| (r.id, p)))
    }

    /// Approval edges of vertices still computing their proof of work.
    pub fn inflight_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.inflight.iter().flat_map(move |&v| {
            self.records[v as usize]
                .parents
                .iter()
                .map(move |&p| (v, p))
        })
    }

    /// Tip set `depth` steps before this state; the genesis alone before time 0.
    pub fn tips_at_lookback(&self, depth: u32) -> Result<&[VertexId], ModelError> {
        self.history
            .get(depth as usize)
            .map(|s| &s[..])
            .ok_or(ModelError::OutOfHistory {
                depth,
                max: self.history.len() as u32 - 1,
            })
    }

    /// `(in-degree, out-degree)` of a solid vertex over solid edges.
    pub fn degrees(&self, v: VertexId) -> Result<(u32, u32), ModelError> {
        if !self.is_solid(v) {
            return Err(ModelError::UnknownVertex(v));
        }
        let i = v as usize;
        Ok((self.solid_in_degree[i], self.records[i].parents.len() as u32))
    }

    /// Distinct decision parents that are free tips in this state.
    pub fn delta_of(&self, decision: &ArrivalDecision) -> u32 {
        decision
            .distinct_parents()
            .iter()
            .filter(|p| self.free.contains(p))
            .count() as u32
    }

    /// Returns the successor state; `self` is left untouched.
    pub fn apply_step(&self, decision: &ArrivalDecision) -> Result<TangleState, ModelError> {
        let mut next = self.clone();
        next.apply_in_place(decision)?;
        Ok(next)
    }

    /// In-place form of [`apply_step`](Self::apply_step). On error the state
    /// is unchanged.
    pub fn apply_in_place(&mut self, decision: &ArrivalDecision) -> Result<StepOutcome, ModelError> {
        let n = self.now + 1;
        self.check(n, decision)?;

        let parents = decision.distinct_parents();
        let delta = self.delta_of(decision);
        self.records.push_back(VertexRecord {
            id: n,
            theta: decision.theta,
            eps: decision.eps,
            parents: parents.clone(),
            completion_time: n + decision.theta as u64,
        });
        self.solid_in_degree.push_back(0);
        self.inflight.insert(n);
        for p in &parents {
            if self.free.remove(p) {
                self.pending.insert(*p);
            }
        }

        let done: Vec<VertexId> = self
            .inflight
            .iter()
            .copied()
            .filter(|&v| self.records[v as usize].completion_time == n)
            .collect();
        for &c in &done {
            self.inflight.remove(&c);
            for &p in self.records[c as usize].parents.clone().iter() {
                let deg = &mut self.solid_in_degree[p as usize];
                *deg += 1;
                if *deg as u64 > self.params.h_max() as u64 {
                    log::debug!("vertex {p} reached solid in-degree {deg} at step {n}");
                }
                self.tips.remove(&p);
                self.free.remove(&p);
                self.pending.remove(&p);
            }
        }
        for &c in &done {
            self.tips.insert(c);
            let approved = self
                .inflight
                .iter()
                .any(|&v| self.records[v as usize].parents.contains(&c));
            if approved {
                self.pending.insert(c);
            } else {
                self.free.insert(c);
            }
        }

        self.now = n;
        self.history
            .push_front(self.tips.iter().copied().collect::<Vec<_>>().into());
        self.history.pop_back();
        self.last_completions = done.len() as u32;
        Ok(StepOutcome {
            delta,
            completions: self.last_completions,
        })
    }

    fn check(&self, n: u64, d: &ArrivalDecision) -> Result<(), ModelError> {
        let invalid = |what: String| ModelError::InvalidDecision { step: n, what };
        let p = &self.params;
        if !p.h.contains(&d.theta) {
            return Err(invalid(format!("theta {} outside the duration support", d.theta)));
        }
        if !p.eps_support.contains(&d.eps) {
            return Err(invalid(format!("eps {} outside the lookback support", d.eps)));
        }
        if !p.k_parents.contains(d.parents.len() as u32) {
            return Err(invalid(format!(
                "{} parents is not an admissible parent count",
                d.parents.len()
            )));
        }
        match self.validation {
            Validation::Strict => {
                let lookback = self.tips_at_lookback(d.eps)?;
                for &parent in &d.parents {
                    if lookback.binary_search(&parent).is_err() {
                        return Err(ModelError::ProtocolViolation {
                            step: n,
                            parent,
                            depth: d.eps,
                        });
                    }
                }
            }
            Validation::Structural => {
                let done = n + d.theta as u64;
                for &parent in &d.parents {
                    let ok = self
                        .record(parent)
                        .is_some_and(|r| r.completion_time < done);
                    if !ok {
                        return Err(ModelError::ParentOutOfOrder { step: n, parent });
                    }
                }
            }
        }
        Ok(())
    }
}
