//! Forced bottleneck: a finite schedule that, started from a state with at
//! most `b` tips, funnels every later arrival through a common ancestor set.
//!
//! Phase A tidies the in-flight work and grows the free-tip set, phase B
//! fences off a block of free tips, and phase C weaves the mesh in which
//! each arrival approves two neighbours of the previous column.

mod labels;
mod plan;
mod thresholds;
mod verify;

use thiserror::Error;

pub use labels::{interchange_parents, Label, LabelError, Labeling};
pub use plan::{
    feasibility_case, fb_size, labeling_at, plan_bottleneck, plan_step_a, plan_step_b,
    plan_step_c, BottleneckPlan, Phase, PhaseSchedule, ScheduledArrival,
};
pub use thresholds::{rho, thresholds, thresholds_for_b, LogProb, Thresholds};
pub use verify::{verify_bottleneck, BottleneckReport, CheckResult, Deviation, VerifyError};

use crate::params::ConfigError;
use crate::state::ModelError;

#[derive(Debug, Error)]
pub enum BottleneckError {
    #[error("arrival {i} sees {l} tips, more than b = {b}")]
    NotAtBottleneck { i: u64, l: u64, b: u64 },
    #[error("phase {phase:?} fails at arrival {step}{}{}: {reason}",
        label.map(|l| format!(" {l}")).unwrap_or_default(),
        case.map(|c| format!(" (case {c})")).unwrap_or_default())]
    Construction {
        phase: Phase,
        step: u64,
        label: Option<Label>,
        case: Option<u8>,
        reason: String,
    },
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
