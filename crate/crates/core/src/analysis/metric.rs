//! Local metric on graphs rooted at the genesis: two graphs are at distance
//! `1 / (r + 1)` when `r` is the largest radius at which their balls around
//! the root coincide.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::graph::Snapshot;
use crate::params::VertexId;

pub const UNREACHED: u64 = u64::MAX;

/// Length of the shortest directed path from every vertex to the genesis,
/// [`UNREACHED`] when there is none.
pub fn root_distances(g: &Snapshot) -> Vec<u64> {
    let mut dist = vec![UNREACHED; g.id_bound()];
    if !g.contains(0) {
        return dist;
    }
    dist[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &c in g.children(v) {
            if dist[c as usize] == UNREACHED {
                dist[c as usize] = dist[v as usize] + 1;
                queue.push_back(c);
            }
        }
    }
    dist
}

/// Canonical byte encoding of the ball of radius `r` around the genesis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RBallCode(pub Vec<u8>);

/// Vertices in breadth-first order from the root (children ascending),
/// each followed by its distance and its parents inside the ball.
pub fn r_ball_code(g: &Snapshot, r: u64) -> RBallCode {
    let mut dist = vec![UNREACHED; g.id_bound()];
    let mut order = Vec::new();
    if g.contains(0) {
        dist[0] = 0;
        let mut queue = VecDeque::from([0u64]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            if dist[v as usize] == r {
                continue;
            }
            for &c in g.children(v) {
                if dist[c as usize] == UNREACHED {
                    dist[c as usize] = dist[v as usize] + 1;
                    queue.push_back(c);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(order.len() * 24);
    for v in order {
        out.extend_from_slice(&v.to_le_bytes());
        out.extend_from_slice(&dist[v as usize].to_le_bytes());
        let inside: Vec<VertexId> = g
            .parents(v)
            .iter()
            .copied()
            .filter(|&p| dist[p as usize] != UNREACHED)
            .collect();
        out.extend_from_slice(&(inside.len() as u32).to_le_bytes());
        for p in inside {
            out.extend_from_slice(&p.to_le_bytes());
        }
    }
    RBallCode(out)
}

/// Distance between two rooted graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDistance {
    /// Largest radius with identical balls; `None` when the graphs agree at
    /// every radius.
    pub agree_radius: Option<u64>,
}

impl MetricDistance {
    pub fn value(&self) -> f64 {
        match self.agree_radius {
            None => 0.0,
            Some(r) => 1.0 / (r as f64 + 1.0),
        }
    }
}

/// The two balls of radius `r` differ exactly when `r` is at least the
/// smallest level at which a vertex or an edge differs.
pub fn d_star(a: &Snapshot, b: &Snapshot) -> MetricDistance {
    let (da, db) = (root_distances(a), root_distances(b));
    let at = |d: &[u64], v: VertexId| d.get(v as usize).copied().unwrap_or(UNREACHED);
    let mut first = UNREACHED;
    let bound = da.len().max(db.len()) as VertexId;
    for v in 0..bound {
        let (x, y) = (at(&da, v), at(&db, v));
        if x != y {
            first = first.min(x.min(y));
            continue;
        }
        if x == UNREACHED {
            continue;
        }
        let (pa, pb) = (a.parents(v), b.parents(v));
        if pa == pb {
            continue;
        }
        // edge (v, p) joins the ball at level max(d(v), d(p))
        for (side, other, d) in [(pa, pb, &da), (pb, pa, &db)] {
            for &p in side {
                let lvl = x.max(at(d, p));
                if lvl != UNREACHED && !other.contains(&p) {
                    first = first.min(lvl);
                }
            }
        }
    }
    MetricDistance {
        agree_radius: (first != UNREACHED).then(|| first - 1),
    }
}
