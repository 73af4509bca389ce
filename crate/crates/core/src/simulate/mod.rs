//! Shared-noise flow simulation.

pub mod export;
pub mod flow;
pub mod noise;
pub mod taming;

pub use flow::{
    advance, integrate_flow, integrate_flow_observed, pullback_ensemble, pullback_state, verify_cocycle,
    CocycleReport, FlowEnsemble, FlowOptions, RunStats, Snapshot, Trajectory,
};
pub use noise::{steps_in, NoisePath, TimeGrid};
pub use taming::Taming;
