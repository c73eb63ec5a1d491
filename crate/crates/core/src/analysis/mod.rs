//! Post-hoc analysis of traces: reachability, confirmation, martingale and
//! recurrence statistics, and the rooted-graph metric.

mod confirm;
mod graph;
mod martingale;
mod metric;
mod reach;
mod recurrence;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use confirm::{confirmed_set, confirmed_with, cut};
pub use graph::{History, Snapshot};
pub use martingale::{
    bookkeeping_residual_max, completion_window, martingale_check, MartingaleMonitor, WindowCheck,
};
pub use metric::{d_star, r_ball_code, root_distances, MetricDistance, RBallCode, UNREACHED};
pub use reach::{ancestors, reachable, sweep, Marks};
pub use recurrence::{tip_recurrence, Excursion, TipRecurrence};

use crate::params::{ConfigError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("state {t} lies beyond the trace horizon {horizon}")]
    BeyondHorizon { t: u64, horizon: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("ball of radius {radius} changed at state {state}: vertex {vertex} became solid inside it")]
    Unstable {
        radius: u64,
        state: u64,
        vertex: VertexId,
    },
}

/// Whether the ball around the genesis that contains the nearest pre-anchor
/// tip stays fixed once the mesh is complete.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    /// Smallest root distance over the tips seen by the anchor arrival.
    pub radius: u64,
    pub first_state: u64,
    pub last_state: u64,
    pub snapshots: u64,
    /// First state whose ball differs from the one at `first_state`, and a
    /// vertex that became solid inside the ball there.
    pub change: Option<(u64, VertexId)>,
}

impl StabilizationReport {
    pub fn stable(&self) -> bool {
        self.change.is_none()
    }

    pub fn into_result(self) -> Result<StabilizationReport, AnalysisError> {
        match self.change {
            None => Ok(self),
            Some((state, vertex)) => Err(AnalysisError::Unstable {
                radius: self.radius,
                state,
                vertex,
            }),
        }
    }
}

/// Checks that the ball around the genesis reaching the nearest tip seen by
/// arrival `anchor` is the same at every state from `from` through the
/// horizon.
///
/// Parents are solid when approved, so a solid vertex keeps its distance to
/// the genesis forever and the ball can only change at a state where a vertex
/// within the radius becomes solid. Encodings are compared at every such
/// state, and at every `stride`-th state as a spot check.
pub fn stabilization_radius(
    history: &History,
    anchor: u64,
    from: u64,
) -> Result<StabilizationReport, AnalysisError> {
    const STRIDE: u64 = 64;
    if anchor == 0 || from > history.horizon() {
        return Err(AnalysisError::BeyondHorizon {
            t: from,
            horizon: history.horizon(),
        });
    }
    let dist = root_distances(&history.eventual());
    let radius = history
        .tips_at(anchor - 1)
        .into_iter()
        .map(|v| dist[v as usize])
        .min()
        .unwrap_or(UNREACHED);
    let mut entering: Vec<(u64, VertexId)> = (0..=history.horizon())
        .filter(|&v| dist[v as usize] <= radius)
        .map(|v| (history.completion(v), v))
        .filter(|&(s, _)| s > from && s <= history.horizon())
        .collect();
    entering.sort_unstable();
    let base = r_ball_code(&history.snapshot(from), radius);
    let mut change = None;
    let spot = (from + 1..=history.horizon())
        .filter(|s| (s - from).is_multiple_of(STRIDE) || *s == history.horizon());
    let mut states: Vec<u64> = entering.iter().map(|&(s, _)| s).chain(spot).collect();
    states.sort_unstable();
    states.dedup();
    for s in states {
        if r_ball_code(&history.snapshot(s), radius) != base {
            let vertex = entering
                .iter()
                .find(|&&(t, _)| t <= s)
                .map(|&(_, v)| v)
                .unwrap_or(s);
            change = Some((s, vertex));
            break;
        }
    }
    Ok(StabilizationReport {
        radius,
        first_state: from,
        last_state: history.horizon(),
        snapshots: history.horizon() - from + 1,
        change,
    })
}
