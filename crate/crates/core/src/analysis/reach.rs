//! Directed reachability along approval edges.

use super::graph::Snapshot;
use super::AnalysisError;
use crate::params::VertexId;

/// Does a directed path lead from `src` to `dst`? A vertex reaches itself.
pub fn reachable(g: &Snapshot, src: VertexId, dst: VertexId) -> Result<bool, AnalysisError> {
    for v in [src, dst] {
        if !g.contains(v) {
            return Err(AnalysisError::UnknownVertex(v));
        }
    }
    if src == dst {
        return Ok(true);
    }
    let mut seen = vec![false; g.id_bound()];
    let mut stack = vec![src];
    seen[src as usize] = true;
    while let Some(v) = stack.pop() {
        for &p in g.parents(v) {
            if p == dst {
                return Ok(true);
            }
            // parents are older, so nothing below dst can lead back up to it
            if p > dst && !seen[p as usize] {
                seen[p as usize] = true;
                stack.push(p);
            }
        }
    }
    Ok(false)
}

/// Reusable marker for repeated traversals over the same id range.
pub struct Marks {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Marks {
    pub fn new(bound: usize) -> Self {
        Marks {
            stamp: vec![0; bound],
            epoch: 0,
        }
    }

    fn reset(&mut self) {
        self.epoch += 1;
    }

    fn mark(&mut self, v: VertexId) -> bool {
        let s = &mut self.stamp[v as usize];
        if *s == self.epoch {
            false
        } else {
            *s = self.epoch;
            true
        }
    }

    pub fn is_marked(&self, v: VertexId) -> bool {
        self.stamp.get(v as usize).is_some_and(|&s| s == self.epoch)
    }
}

/// Marks every vertex reachable from `sources` (inclusive), following
/// parent edges when `up` and child edges otherwise.
pub fn sweep(g: &Snapshot, sources: &[VertexId], up: bool, marks: &mut Marks) {
    marks.reset();
    let mut stack = Vec::new();
    for &s in sources {
        if g.contains(s) && marks.mark(s) {
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        let next = if up { g.parents(v) } else { g.children(v) };
        for &w in next {
            if marks.mark(w) {
                stack.push(w);
            }
        }
    }
}

/// Ancestors of `src` including itself, ascending.
pub fn ancestors(g: &Snapshot, src: VertexId) -> Vec<VertexId> {
    let mut marks = Marks::new(g.id_bound());
    sweep(g, &[src], true, &mut marks);
    (0..=src).filter(|&v| marks.is_marked(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Snapshot {
        let e: [(u64, &[u64]); 5] = [(0, &[]), (1, &[0]), (2, &[0]), (3, &[1, 2]), (4, &[2])];
        Snapshot::from_edges(e)
    }

    #[test]
    fn basic_paths() {
        let g = diamond();
        assert!(reachable(&g, 3, 0).unwrap());
        assert!(reachable(&g, 4, 2).unwrap());
        assert!(!reachable(&g, 4, 1).unwrap());
        assert!(!reachable(&g, 0, 3).unwrap());
        assert!(reachable(&g, 2, 2).unwrap());
        assert_eq!(ancestors(&g, 3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn unknown_vertex() {
        assert_eq!(
            reachable(&diamond(), 9, 0),
            Err(AnalysisError::UnknownVertex(9))
        );
    }
}
