//! Reconstruction of past snapshots from arrival records, and plain graph
//! snapshots for traversal.

use crate::engine::Trace;
use crate::params::VertexId;
use crate::state::{Parents, TangleState};

const NEVER: u64 = u64::MAX;

/// Solid approval graph frozen at one moment (or the graph of all recorded
/// edges). Edges point from child to parent, so parent ids are smaller.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Snapshot {
    present: Vec<bool>,
    parents: Vec<Parents>,
    children: Vec<Vec<VertexId>>,
}

impl Snapshot {
    /// Builds a snapshot from `(id, parents)` pairs; parents need not be sorted.
    pub fn from_edges<'a>(
        vertices: impl IntoIterator<Item = (VertexId, &'a [VertexId])>,
    ) -> Snapshot {
        let mut s = Snapshot::default();
        for (v, ps) in vertices {
            s.insert(v, ps);
        }
        for c in &mut s.children {
            c.sort_unstable();
        }
        s
    }

    fn insert(&mut self, v: VertexId, ps: &[VertexId]) {
        let need = v as usize + 1;
        if self.present.len() < need {
            self.present.resize(need, false);
            self.parents.resize(need, Parents::new());
            self.children.resize(need, Vec::new());
        }
        self.present[v as usize] = true;
        let mut ps: Parents = ps.iter().copied().collect();
        ps.sort_unstable();
        ps.dedup();
        for &p in &ps {
            if self.children.len() <= p as usize {
                self.present.resize(p as usize + 1, false);
                self.parents.resize(p as usize + 1, Parents::new());
                self.children.resize(p as usize + 1, Vec::new());
            }
            self.children[p as usize].push(v);
        }
        self.parents[v as usize] = ps;
    }

    /// Solid graph of a live state.
    pub fn of_state(state: &TangleState) -> Snapshot {
        Snapshot::from_edges(
            state
                .records()
                .filter(|r| state.is_solid(r.id))
                .map(|r| (r.id, &r.parents[..])),
        )
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.present.get(v as usize).copied().unwrap_or(false)
    }

    /// Parents of `v`; empty when `v` is absent.
    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        if self.contains(v) {
            &self.parents[v as usize]
        } else {
            &[]
        }
    }

    /// Children of `v` present in the snapshot, ascending.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        self.children.get(v as usize).map(|c| &c[..]).unwrap_or(&[])
    }

    /// Exclusive upper bound on vertex ids.
    pub fn id_bound(&self) -> usize {
        self.present.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(v, _)| v as VertexId)
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().map(|v| self.parents(v).len()).sum()
    }
}

/// Arrival records of a trace, queryable at any state index up to the horizon.
///
/// A vertex is solid in `S_s` once its proof of work is done, and stays a
/// tip until the first of its children becomes solid.
#[derive(Clone, Debug)]
pub struct History {
    horizon: u64,
    h_max: u64,
    eps_max: u32,
    parents: Vec<Parents>,
    completion: Vec<u64>,
    first_child: Vec<u64>,
    tip_end: Vec<u64>,
    children: Vec<Vec<VertexId>>,
}

impl History {
    pub fn from_trace(trace: &Trace) -> History {
        let recs = trace.steps.iter().map(|s| {
            (
                s.n,
                s.n + s.decision.theta as u64,
                s.decision.distinct_parents(),
            )
        });
        History::build(
            trace.len(),
            trace.params.h_max() as u64,
            trace.params.eps_max(),
            recs,
        )
    }

    pub fn from_state(state: &TangleState) -> History {
        let recs = state
            .records()
            .skip(1)
            .map(|r| (r.id, r.completion_time, r.parents.clone()));
        History::build(
            state.now(),
            state.params().h_max() as u64,
            state.params().eps_max(),
            recs,
        )
    }

    fn build(
        horizon: u64,
        h_max: u64,
        eps_max: u32,
        recs: impl Iterator<Item = (VertexId, u64, Parents)>,
    ) -> History {
        let n = horizon as usize + 1;
        let mut h = History {
            horizon,
            h_max,
            eps_max,
            parents: vec![Parents::new(); n],
            completion: vec![0; n],
            first_child: vec![NEVER; n],
            tip_end: vec![NEVER; n],
            children: vec![Vec::new(); n],
        };
        for (v, done, ps) in recs {
            let vi = v as usize;
            h.completion[vi] = done;
            for &p in &ps {
                let pi = p as usize;
                h.first_child[pi] = h.first_child[pi].min(v);
                h.tip_end[pi] = h.tip_end[pi].min(done);
                h.children[pi].push(v);
            }
            h.parents[vi] = ps;
        }
        h
    }

    /// Index of the last recorded arrival.
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn eps_max(&self) -> u32 {
        self.eps_max
    }

    pub fn completion(&self, v: VertexId) -> u64 {
        self.completion[v as usize]
    }

    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        &self.parents[v as usize]
    }

    /// Children in arrival order.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v as usize]
    }

    pub fn is_solid(&self, v: VertexId, s: u64) -> bool {
        v <= self.horizon && self.completion[v as usize] <= s
    }

    /// `[start, end)` of the state indices at which `v` is a tip; `end` is
    /// `u64::MAX` if no child ever becomes solid.
    pub fn tip_interval(&self, v: VertexId) -> (u64, u64) {
        (self.completion[v as usize], self.tip_end[v as usize])
    }

    pub fn is_tip(&self, v: VertexId, s: u64) -> bool {
        let (a, b) = self.tip_interval(v);
        a <= s && s < b
    }

    pub fn is_pending(&self, v: VertexId, s: u64) -> bool {
        self.is_tip(v, s) && self.first_child[v as usize] <= s
    }

    pub fn is_free(&self, v: VertexId, s: u64) -> bool {
        self.is_tip(v, s) && self.first_child[v as usize] > s
    }

    pub fn tips_at(&self, s: u64) -> Vec<VertexId> {
        (0..=s.min(self.horizon)).filter(|&v| self.is_tip(v, s)).collect()
    }

    pub fn free_at(&self, s: u64) -> Vec<VertexId> {
        (0..=s.min(self.horizon)).filter(|&v| self.is_free(v, s)).collect()
    }

    pub fn inflight_at(&self, s: u64) -> Vec<VertexId> {
        let lo = s.saturating_sub(self.h_max).max(1);
        (lo..=s.min(self.horizon))
            .filter(|&v| self.completion[v as usize] > s)
            .collect()
    }

    /// Solid vertices of `S_s`.
    pub fn solid_at(&self, s: u64) -> impl Iterator<Item = VertexId> + '_ {
        (0..=s.min(self.horizon)).filter(move |&v| self.completion[v as usize] <= s)
    }

    /// Solid graph of `S_s`.
    pub fn snapshot(&self, s: u64) -> Snapshot {
        Snapshot::from_edges(self.solid_at(s).map(|v| (v, &self.parents[v as usize][..])))
    }

    /// Every recorded edge, in flight or not.
    pub fn eventual(&self) -> Snapshot {
        Snapshot::from_edges((0..=self.horizon).map(|v| (v, &self.parents[v as usize][..])))
    }
}
