//! Hand-drawn reference graphs, replayed in structural mode.
//!
//! Every arrival uses `theta = 2`, so a parent always finishes before its
//! children and the drawn edges are the only thing that matters.

use std::path::Path;

use crate::engine::{self, EngineError, Trace};
use crate::io::{self, IoError};
use crate::params::{ModelParams, ParentCount, VertexId};
use crate::state::{ArrivalDecision, Validation};

/// Vertices kept in the periodic fixtures.
pub const FIXTURE_VERTICES: u64 = 200;

pub const NAMES: [&str; 3] = ["fig1", "fig2-left", "fig2-right"];

fn params() -> ModelParams {
    ModelParams {
        k_parents: ParentCount::Fixed(2),
        ..ModelParams::reference()
    }
}

fn arrival(parents: [VertexId; 2]) -> ArrivalDecision {
    ArrivalDecision::new(2, 1, &parents)
}

/// Small graph with two vertices still in flight at the end.
pub fn fig1_decisions() -> Vec<ArrivalDecision> {
    [[0, 0], [1, 0], [1, 1], [2, 3], [2, 3]]
        .into_iter()
        .map(arrival)
        .collect()
}

/// Braided chain with period four.
pub fn fig2_left_decisions(vertices: u64) -> Vec<ArrivalDecision> {
    (1..vertices)
        .map(|n| match (n, n % 4) {
            (1, _) => arrival([0, 0]),
            (2, _) => arrival([0, 1]),
            (_, 0) => arrival([n - 2, n - 2]),
            (_, 1) => arrival([n - 2, n - 2]),
            (_, _) => arrival([n - 2, n - 1]),
        })
        .collect()
}

/// Two chains meeting only at the genesis.
pub fn fig2_right_decisions(vertices: u64) -> Vec<ArrivalDecision> {
    (1..vertices)
        .map(|n| if n <= 2 { arrival([0, 0]) } else { arrival([n - 2, n - 2]) })
        .collect()
}

pub fn decisions(name: &str) -> Option<Vec<ArrivalDecision>> {
    match name {
        "fig1" => Some(fig1_decisions()),
        "fig2-left" => Some(fig2_left_decisions(FIXTURE_VERTICES)),
        "fig2-right" => Some(fig2_right_decisions(FIXTURE_VERTICES)),
        _ => None,
    }
}

pub fn build(name: &str) -> Result<Trace, EngineError> {
    let d = decisions(name).ok_or_else(|| EngineError::Config(crate::ConfigError::Invalid(format!(
        "unknown fixture {name}"
    ))))?;
    engine::replay(&params(), Validation::Structural, &d)
}

/// Write every fixture as `<dir>/<name>.csv` plus its sidecar.
pub fn write_all(dir: &Path) -> Result<(), IoError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for name in NAMES {
        let trace = build(name).expect("fixture graphs replay");
        io::write_trace(&trace, &dir.join(format!("{name}.csv")))?;
    }
    Ok(())
}
