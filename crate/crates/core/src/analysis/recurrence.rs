use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::bottleneck::thresholds_for_b;
use crate::engine::Trace;

/// A maximal run of states with more than `b` tips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Excursion {
    /// First state above `b`.
    pub start: u64,
    /// First state back at or below `b`, if the trace reaches it.
    pub end: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipRecurrence {
    pub b: u64,
    /// `b` does not exceed the admissible minimum for these parameters.
    pub below_admissible: bool,
    /// States `n >= 1` with `L(S_n) <= b`.
    #[serde(skip)]
    pub hits: Vec<u64>,
    pub hit_count: u64,
    /// Greedy hits at mutual distance more than `2 kappa_C`.
    pub spaced_hits: Vec<u64>,
    pub excursions: Vec<Excursion>,
    pub completed_excursions: u64,
    pub max_excursion: u64,
}

pub fn tip_recurrence(trace: &Trace, b: u64) -> Result<TipRecurrence, AnalysisError> {
    let th = thresholds_for_b(&trace.params, b)?;
    let spacing = 2 * th.kappa_c;
    let mut hits = Vec::new();
    let mut spaced_hits: Vec<u64> = Vec::new();
    let mut excursions = Vec::new();
    let mut open: Option<u64> = None;
    for s in &trace.steps {
        if s.l as u64 <= b {
            hits.push(s.n);
            if spaced_hits.last().is_none_or(|&last| s.n - last > spacing) {
                spaced_hits.push(s.n);
            }
            if let Some(start) = open.take() {
                excursions.push(Excursion {
                    start,
                    end: Some(s.n),
                });
            }
        } else if open.is_none() {
            open = Some(s.n);
        }
    }
    if let Some(start) = open {
        excursions.push(Excursion { start, end: None });
    }
    let completed: Vec<u64> = excursions
        .iter()
        .filter_map(|e| e.end.map(|end| end - e.start))
        .collect();
    Ok(TipRecurrence {
        b,
        below_admissible: b <= th.b_min,
        hit_count: hits.len() as u64,
        hits,
        spaced_hits,
        completed_excursions: completed.len() as u64,
        max_excursion: completed.into_iter().max().unwrap_or(0),
        excursions,
    })
}
