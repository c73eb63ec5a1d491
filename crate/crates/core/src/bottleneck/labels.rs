use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::VertexId;

/// Position `(j, k)` of a vertex in the interchange mesh anchored at `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub i: u64,
    pub j: u64,
    pub k: u64,
}

impl Label {
    pub fn new(i: u64, j: u64, k: u64) -> Self {
        Label { i, j, k }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("label {0} lies outside the mesh")]
    OutOfRange(Label),
    #[error("vertex {0} is not part of the mesh")]
    NotInMesh(VertexId),
}

/// Labels of the mesh: column one is the ordered set of free tips and
/// in-flight vertices when the mesh starts, and the arrivals
/// `start..=last` fill columns `2, 3, ...` of height `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub i: u64,
    /// First arrival of the mesh.
    pub start: u64,
    /// Last forced arrival of the mesh.
    pub last: u64,
    pub column_one: Vec<VertexId>,
}

impl Labeling {
    pub fn c(&self) -> u64 {
        self.column_one.len() as u64
    }

    pub fn xi(&self, label: Label) -> Result<VertexId, LabelError> {
        let c = self.c();
        if label.i != self.i || label.j == 0 || label.k == 0 || label.k > c {
            return Err(LabelError::OutOfRange(label));
        }
        if label.j == 1 {
            return Ok(self.column_one[label.k as usize - 1]);
        }
        let v = (label.j - 2)
            .checked_mul(c)
            .and_then(|x| x.checked_add(self.start - 1 + label.k))
            .ok_or(LabelError::OutOfRange(label))?;
        if v > self.last {
            return Err(LabelError::OutOfRange(label));
        }
        Ok(v)
    }

    pub fn label_of(&self, v: VertexId) -> Result<Label, LabelError> {
        if (self.start..=self.last).contains(&v) {
            let off = v - self.start;
            return Ok(Label::new(self.i, 2 + off / self.c(), off % self.c() + 1));
        }
        self.column_one
            .binary_search(&v)
            .map(|pos| Label::new(self.i, 1, pos as u64 + 1))
            .map_err(|_| LabelError::NotInMesh(v))
    }

    /// The two labels a mesh vertex in column `j >= 2` must approve.
    pub fn interchange_parents(&self, label: Label) -> (Label, Label) {
        interchange_parents(label, self.c())
    }
}

/// `(j-1, max(1, k-1))` and `(j-1, min(k+1, c))`.
pub fn interchange_parents(label: Label, c: u64) -> (Label, Label) {
    let Label { i, j, k } = label;
    debug_assert!(j >= 2);
    (
        Label::new(i, j - 1, k.saturating_sub(1).max(1)),
        Label::new(i, j - 1, (k + 1).min(c)),
    )
}
