use std::collections::BTreeSet;

use super::graph::{History, Snapshot};
use super::reach::{sweep, Marks};
use super::AnalysisError;
use crate::params::VertexId;

/// Vertices that could still approve something new at `t`: the tips of the
/// last `eps_max + 1` states and the vertices still computing their proof of work.
pub fn cut(history: &History, t: u64) -> BTreeSet<VertexId> {
    let lo = t.saturating_sub(history.eps_max() as u64);
    let mut out: BTreeSet<VertexId> = (lo..=t).flat_map(|s| history.tips_at(s)).collect();
    out.extend(history.inflight_at(t));
    out
}

/// Solid vertices of `S_t` reached by every vertex of the cut at `t`.
/// Every later arrival descends from the cut, so these vertices are
/// approved by all of the future.
pub fn confirmed_set(history: &History, t: u64) -> Result<BTreeSet<VertexId>, AnalysisError> {
    if t > history.horizon() {
        return Err(AnalysisError::BeyondHorizon {
            t,
            horizon: history.horizon(),
        });
    }
    confirmed_with(history, &history.eventual(), t)
}

/// Same as [`confirmed_set`] with a prebuilt graph of all recorded edges.
pub fn confirmed_with(
    history: &History,
    eventual: &Snapshot,
    t: u64,
) -> Result<BTreeSet<VertexId>, AnalysisError> {
    let cut = cut(history, t);
    let mut count = vec![0u32; t as usize + 1];
    let mut marks = Marks::new(eventual.id_bound());
    for &u in &cut {
        sweep(eventual, &[u], true, &mut marks);
        for v in 0..=t.min(u) {
            if marks.is_marked(v) {
                count[v as usize] += 1;
            }
        }
    }
    let need = cut.len() as u32;
    Ok(history
        .solid_at(t)
        .filter(|&v| count[v as usize] == need)
        .collect())
}
