//! Simulation and finite-instance verification for the discrete-time tangle
//! model with proof-of-work delays and stale tip views.
//!
//! [`state`] holds the graph and its one-step transition, [`engine`] draws
//! arrivals from a seeded stream, [`bottleneck`] builds and checks the forced
//! interchange schedule, and [`analysis`] provides reachability, confirmation
//! and the rooted-graph metric. [`io`] and [`experiment`] back the command line.

pub mod params;
pub mod state;
pub mod engine;
pub mod analysis;
pub mod bottleneck;
pub mod io;
pub mod experiment;
pub mod fixtures;

pub use params::{ConfigError, ModelParams, ParentCount, VertexId};
pub use state::{ArrivalDecision, ModelError, TangleState, Validation, VertexRecord};
